import re
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Callable, List, Sequence, Tuple

from .ExactMatrix import ExactMatrix, Vector
from .GaussRational import GaussRational, ZERO, ONE, I
from .LabCommon import AlgebraMismatch, BadBlockIndex, DimensionMismatch, Finding, InvalidHomomorphism

logger = logging.getLogger(__name__)

_BLOCKS = re.compile(r'^\s*blocks\s*=\s*\[\s*(\d+(?:\s*,\s*\d+)*)?\s*\]\s*$')


@dataclass(frozen=True)
class Algebra:
    """
    Tổng trực tiếp các khối ma trận đầy đủ M_n1 ⊕ ... ⊕ M_nm trên ℚ[i].
    Cơ sở: các ma trận đơn vị E_ij theo từng khối, trong mỗi khối theo thứ tự hàng.
    """
    blocks: Tuple[int, ...]

    @classmethod
    def parse(cls, text: str) -> 'Algebra':
        match = _BLOCKS.match(text)
        if not match:
            raise ValueError(f"Chuỗi đại số không hợp lệ: '{text}' (ví dụ đúng: blocks=[2,1]).")
        sizes = tuple(int(s) for s in match.group(1).split(',')) if match.group(1) else ()
        if any(n <= 0 for n in sizes):
            raise ValueError(f"Kích thước khối phải dương: '{text}'.")
        return cls(sizes)

    @classmethod
    def diagonal(cls, n: int) -> 'Algebra':
        return cls((1,) * n)

    @classmethod
    def matrices(cls, n: int) -> 'Algebra':
        return cls((n,))

    def __str__(self):
        return f"blocks=[{','.join(str(n) for n in self.blocks)}]"

    @property
    def label(self) -> str:
        if not self.blocks:
            return '0'
        if all(n == 1 for n in self.blocks):
            return f"C^{len(self.blocks)}"
        return '+'.join('C' if n == 1 else f"M{n}" for n in self.blocks)

    @cached_property
    def offsets(self) -> Tuple[int, ...]:
        out, acc = [], 0
        for n in self.blocks:
            out.append(acc)
            acc += n * n
        return tuple(out)

    @property
    def dim(self) -> int:
        return sum(n * n for n in self.blocks)

    @property
    def is_commutative(self) -> bool:
        return all(n == 1 for n in self.blocks)

    def check_block(self, k: int):
        if not 0 <= k < len(self.blocks):
            raise BadBlockIndex(f"Khối {k} không tồn tại trong đại số {self} ({len(self.blocks)} khối).")

    def basis_index(self, k: int, i: int, j: int) -> int:
        self.check_block(k)
        return self.offsets[k] + i * self.blocks[k] + j

    def basis_vector(self, index: int) -> Vector:
        return tuple(ONE if t == index else ZERO for t in range(self.dim))

    def identity(self) -> Vector:
        out = [ZERO] * self.dim
        for k, n in enumerate(self.blocks):
            for i in range(n):
                out[self.offsets[k] + i * n + i] = ONE
        return tuple(out)

    def zero(self) -> Vector:
        return (ZERO,) * self.dim

    def block_of(self, v: Sequence[GaussRational], k: int) -> ExactMatrix:
        self.check_block(k)
        n, o = self.blocks[k], self.offsets[k]
        return ExactMatrix(n, n, tuple(v[o:o + n * n]))

    def from_blocks(self, matrices: Sequence) -> Vector:
        """Ghép các khối (ExactMatrix hoặc danh sách hàng) thành vector tọa độ."""
        if len(matrices) != len(self.blocks):
            raise DimensionMismatch(f"Cần {len(self.blocks)} khối, nhận {len(matrices)}.")
        out = []
        for n, m in zip(self.blocks, matrices):
            if not isinstance(m, ExactMatrix):
                m = ExactMatrix.from_rows(m)
            if (m.rows, m.cols) != (n, n):
                raise DimensionMismatch(f"Khối {m.rows}x{m.cols} không khớp kích thước {n}x{n}.")
            out.extend(m.entries)
        return tuple(out)

    def multiply(self, u: Sequence[GaussRational], v: Sequence[GaussRational]) -> Vector:
        """Tích theo khối trên vector tọa độ, bỏ qua hệ số 0."""
        out = [ZERO] * self.dim
        for n, o in zip(self.blocks, self.offsets):
            for i in range(n):
                for l in range(n):
                    a = u[o + i * n + l]
                    if not a:
                        continue
                    for j in range(n):
                        b = v[o + l * n + j]
                        if b:
                            out[o + i * n + j] = out[o + i * n + j] + a * b
        return tuple(out)

    def star(self, u: Sequence[GaussRational]) -> Vector:
        out = [ZERO] * self.dim
        for n, o in zip(self.blocks, self.offsets):
            for i in range(n):
                for j in range(n):
                    out[o + j * n + i] = u[o + i * n + j].conjugate()
        return tuple(out)

    def element(self, matrices: Sequence) -> 'AlgElement':
        return AlgElement(self, tuple(self.block_of(self.from_blocks(matrices), k) for k in range(len(self.blocks))))


@dataclass(frozen=True)
class AlgElement:
    algebra: Algebra
    blocks: Tuple[ExactMatrix, ...]

    def __post_init__(self):
        shapes = tuple(m.rows for m in self.blocks)
        if shapes != self.algebra.blocks or any(m.rows != m.cols for m in self.blocks):
            raise DimensionMismatch(f"Các khối {shapes} không khớp đại số {self.algebra}.")

    @classmethod
    def from_vector(cls, algebra: Algebra, v: Sequence[GaussRational]) -> 'AlgElement':
        if len(v) != algebra.dim:
            raise DimensionMismatch(f"Vector độ dài {len(v)} không khớp chiều {algebra.dim}.")
        return cls(algebra, tuple(algebra.block_of(v, k) for k in range(len(algebra.blocks))))

    def vector(self) -> Vector:
        return tuple(x for m in self.blocks for x in m.entries)

    def _same(self, other: 'AlgElement'):
        if self.algebra != other.algebra:
            raise AlgebraMismatch(f"Phần tử thuộc {self.algebra} và {other.algebra}.")

    def __add__(self, other: 'AlgElement') -> 'AlgElement':
        self._same(other)
        return AlgElement(self.algebra, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __mul__(self, other: 'AlgElement') -> 'AlgElement':
        self._same(other)
        return AlgElement(self.algebra, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def scale(self, factor) -> 'AlgElement':
        return AlgElement(self.algebra, tuple(m.scale(factor) for m in self.blocks))

    def star(self) -> 'AlgElement':
        return AlgElement(self.algebra, tuple(m.conjugate_transpose() for m in self.blocks))

    def __str__(self):
        return ' ⊕ '.join(str(m) for m in self.blocks)


def _linear_combination(coefficients: Sequence[GaussRational], vectors: Sequence[Vector], dim: int) -> Vector:
    out = [ZERO] * dim
    for c, v in zip(coefficients, vectors):
        if not c:
            continue
        for t, x in enumerate(v):
            if x:
                out[t] = out[t] + c * x
    return tuple(out)


@dataclass(frozen=True)
class StarHom:
    """*-đồng cấu cho bởi ảnh của từng phần tử cơ sở của nguồn."""
    source: Algebra
    target: Algebra
    images: Tuple[Vector, ...]
    label: str = 'f'

    def __post_init__(self):
        if len(self.images) != self.source.dim or any(len(v) != self.target.dim for v in self.images):
            raise DimensionMismatch(f"Ảnh cơ sở không khớp {self.source} -> {self.target}.")

    @classmethod
    def from_function(cls, source: Algebra, target: Algebra, fn: Callable[[Vector], Vector],
                      label: str = 'f') -> 'StarHom':
        return cls(source, target, tuple(tuple(fn(source.basis_vector(t))) for t in range(source.dim)), label)

    @classmethod
    def identity(cls, algebra: Algebra) -> 'StarHom':
        return cls.from_function(algebra, algebra, lambda v: v, label='id')

    def __call__(self, v: Sequence[GaussRational]) -> Vector:
        if len(v) != self.source.dim:
            raise DimensionMismatch(f"Vector độ dài {len(v)} không thuộc {self.source}.")
        return _linear_combination(v, self.images, self.target.dim)

    def then(self, other: 'StarHom') -> 'StarHom':
        """Hợp thành: trước self, sau other."""
        if self.target != other.source:
            raise AlgebraMismatch(f"Không hợp thành được {self.target} với {other.source}.")
        return StarHom(self.source, other.target, tuple(other(v) for v in self.images),
                       label=f"{other.label}∘{self.label}")

    def verify(self) -> Finding:
        """Nhân tính trên cặp cơ sở, bảo toàn đối hợp và đơn vị."""
        a, b = self.source, self.target
        if self(a.identity()) != b.identity():
            return Finding(False, ('unit',))
        for s in range(a.dim):
            es = a.basis_vector(s)
            if self(a.star(es)) != b.star(self.images[s]):
                return Finding(False, ('star', s))
            for t in range(a.dim):
                left = self(a.multiply(es, a.basis_vector(t)))
                if left != b.multiply(self.images[s], self.images[t]):
                    return Finding(False, ('product', s, t))
        return Finding(True)

    def validated(self) -> 'StarHom':
        result = self.verify()
        if not result:
            raise InvalidHomomorphism(f"'{self.label}': {self.source} -> {self.target} không là *-đồng cấu: {result.witness}.")
        return self

    def __eq__(self, other):
        return (isinstance(other, StarHom) and (self.source, self.target, self.images)
                == (other.source, other.target, other.images))

    def __hash__(self):
        return hash((self.source, self.target, self.images))


def diagonal_homs(m: int, n: int) -> List[StarHom]:
    """
    Mọi *-đồng cấu có đơn vị ℂ^m -> ℂ^n: f(v)_k = v_φ(k) với φ: {0..n-1} -> {0..m-1}.
    """
    source, target = Algebra.diagonal(m), Algebra.diagonal(n)
    homs = []
    for phi in product(range(m), repeat=n):
        label = 'v->(' + ','.join(f"v{c}" for c in phi) + ')'
        homs.append(StarHom.from_function(source, target, lambda v, phi=phi: tuple(v[c] for c in phi), label))
    return homs


def _projection(rows) -> ExactMatrix:
    return ExactMatrix.from_rows([[GaussRational.coerce(x) for x in row] for row in rows])


def named_projections() -> List[Tuple[str, ExactMatrix]]:
    """Các phép chiếu trực giao 2x2 với hệ số ℚ[i] dùng cho họ đồng cấu ℂ² -> M₂."""
    q = _projection([[Fraction(9, 25), Fraction(12, 25)], [Fraction(12, 25), Fraction(16, 25)]])
    half = GaussRational(Fraction(1, 2))
    h = ExactMatrix.from_rows([[half, half * I], [-(half * I), half]])
    identity = ExactMatrix.identity(2)
    return [
        ('0', ExactMatrix.zeros(2, 2)),
        ('I', identity),
        ('E11', _projection([[1, 0], [0, 0]])),
        ('E22', _projection([[0, 0], [0, 1]])),
        ('q', q),
        ('I-q', identity - q),
        ('h', h),
    ]


def projection_homs() -> List[StarHom]:
    """f_p(a, b) = a·p + b·(I − p) từ ℂ² vào M₂ cho mỗi phép chiếu p."""
    source, target = Algebra.diagonal(2), Algebra.matrices(2)
    identity = ExactMatrix.identity(2)
    homs = []
    for name, p in named_projections():
        complement = identity - p
        homs.append(StarHom(source, target, (p.entries, complement.entries), label=f"f_{name}"))
    return homs


def inner_automorphism(algebra: Algebra, unitary_blocks: Sequence[ExactMatrix], label: str = 'Ad(u)') -> StarHom:
    """x ↦ u x u* theo từng khối."""
    if len(unitary_blocks) != len(algebra.blocks):
        raise DimensionMismatch(f"Cần {len(algebra.blocks)} khối unita.")

    def conjugate(v: Vector) -> Vector:
        out = []
        for k, u in enumerate(unitary_blocks):
            m = algebra.block_of(v, k)
            out.extend((u @ m @ u.conjugate_transpose()).entries)
        return tuple(out)

    return StarHom.from_function(algebra, algebra, conjugate, label)


def standard_unitary(n: int) -> ExactMatrix:
    """Một unita hữu tỉ cố định cho khối cỡ n: i với n = 1, quay (3/5, 4/5) với n = 2, hoán vị vòng với n ≥ 3."""
    if n == 1:
        return ExactMatrix.from_rows([[I]])
    if n == 2:
        return _projection([[Fraction(3, 5), Fraction(4, 5)], [Fraction(-4, 5), Fraction(3, 5)]])
    return ExactMatrix.from_rows([[ONE if j == (i + 1) % n else ZERO for j in range(n)] for i in range(n)])
