import re
import logging
from fractions import Fraction
from typing import Optional, Union

logger = logging.getLogger(__name__)

_RATIONAL = re.compile(r'^[+-]?\d+(?:/\d+)?$')
_IMAGINARY = re.compile(r'^[+-]?(?:\d+(?:/\d+)?)?$')


class GaussRational:
    """
    Số phức hữu tỉ a + b·i với a, b là Fraction (trường ℚ[i]).
    Giá trị bất biến, so sánh và băm theo dạng chính tắc của Fraction.
    """

    __slots__ = ('re', 'im')

    def __init__(self, re: Union[int, Fraction] = 0, im: Union[int, Fraction] = 0):
        object.__setattr__(self, 're', Fraction(re))
        object.__setattr__(self, 'im', Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRational là bất biến.")

    @classmethod
    def coerce(cls, value) -> 'GaussRational':
        if isinstance(value, GaussRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        if isinstance(value, str):
            return parse_gauss(value)
        raise TypeError(f"Không thể chuyển {value!r} thành GaussRational.")

    def __add__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return GaussRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return GaussRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __mul__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if not other.im and not self.im:
            return GaussRational(self.re * other.re)
        return GaussRational(self.re * other.re - self.im * other.im,
                             self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def inverse(self) -> 'GaussRational':
        norm = self.norm()
        if not norm:
            raise ZeroDivisionError("Không thể nghịch đảo GaussRational bằng 0.")
        return GaussRational(self.re / norm, -self.im / norm)

    def conjugate(self) -> 'GaussRational':
        return GaussRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """|z|² = re² + im², luôn là số hữu tỉ."""
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussRational('{self}')"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = '+' if self.im > 0 else '-'
        return f"{self.re}{sign}{abs(self.im)}i"


def _coerce_or_none(value) -> Optional[GaussRational]:
    if isinstance(value, GaussRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussRational(value)
    return None


ZERO = GaussRational(0)
ONE = GaussRational(1)
I = GaussRational(0, 1)


def parse_gauss(text: str) -> GaussRational:
    """
    Đọc literal dạng "a/b" hoặc "a/b+c/di", ví dụ "1", "-1/2", "0+1i", "i", "-3/2i".
    """
    cleaned = str(text).replace(' ', '')
    if not cleaned:
        raise ValueError(f"Literal GaussRational không hợp lệ: '{text}'")
    if not cleaned.endswith('i'):
        real_part, imag_part = cleaned, None
    else:
        body = cleaned[:-1]
        split = max(body.rfind('+'), body.rfind('-'))
        if split > 0:
            real_part, imag_part = body[:split], body[split:]
        else:
            real_part, imag_part = None, body
    if real_part is not None and not _RATIONAL.match(real_part):
        raise ValueError(f"Literal GaussRational không hợp lệ: '{text}'")
    if imag_part is not None and not _IMAGINARY.match(imag_part):
        raise ValueError(f"Literal GaussRational không hợp lệ: '{text}'")
    real = Fraction(real_part) if real_part else Fraction(0)
    if imag_part is None:
        imag = Fraction(0)
    elif imag_part in ('', '+'):
        imag = Fraction(1)
    elif imag_part == '-':
        imag = Fraction(-1)
    else:
        imag = Fraction(imag_part)
    return GaussRational(real, imag)


_OPERATIONS = {
    'add': lambda z, w: z + w,
    'mul': lambda z, w: z * w,
    'neg': lambda z, w: -z,
    'inv': lambda z, w: z.inverse(),
    'conj': lambda z, w: z.conjugate(),
}


def gauss_arith(op: str, z, w=None) -> GaussRational:
    """Phép toán trường trên ℚ[i]: add, mul, neg, inv, conj."""
    if op not in _OPERATIONS:
        raise ValueError(f"Phép toán không được hỗ trợ: '{op}'")
    if op in ('add', 'mul') and w is None:
        raise ValueError(f"Phép toán '{op}' cần hai toán hạng.")
    z = GaussRational.coerce(z)
    w = GaussRational.coerce(w) if w is not None else None
    return _OPERATIONS[op](z, w)
