import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .GaussRational import GaussRational, ZERO, ONE
from .LabCommon import DimensionMismatch

logger = logging.getLogger(__name__)

Vector = Tuple[GaussRational, ...]


@dataclass(frozen=True)
class ExactMatrix:
    """Ma trận hệ số ℚ[i], lưu theo hàng (row-major)."""
    rows: int
    cols: int
    entries: Tuple[GaussRational, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"Ma trận {self.rows}x{self.cols} cần {self.rows * self.cols} phần tử, nhận {len(self.entries)}."
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> 'ExactMatrix':
        rows = [tuple(GaussRational.coerce(x) for x in row) for row in rows]
        width = cols if cols is not None else (len(rows[0]) if rows else 0)
        for row in rows:
            if len(row) != width:
                raise DimensionMismatch(f"Hàng có độ dài {len(row)}, cần {width}.")
        return cls(len(rows), width, tuple(x for row in rows for x in row))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'ExactMatrix':
        return cls(rows, cols, (ZERO,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> 'ExactMatrix':
        return cls(n, n, tuple(ONE if i == j else ZERO for i in range(n) for j in range(n)))

    def __getitem__(self, index: Tuple[int, int]) -> GaussRational:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> List[Vector]:
        return [self.row(i) for i in range(self.rows)]

    def __add__(self, other: 'ExactMatrix') -> 'ExactMatrix':
        self._same_shape(other)
        return ExactMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: 'ExactMatrix') -> 'ExactMatrix':
        self._same_shape(other)
        return ExactMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def scale(self, factor) -> 'ExactMatrix':
        factor = GaussRational.coerce(factor)
        return ExactMatrix(self.rows, self.cols, tuple(factor * x for x in self.entries))

    def __matmul__(self, other: 'ExactMatrix') -> 'ExactMatrix':
        if self.cols != other.rows:
            raise DimensionMismatch(f"Không nhân được ma trận {self.rows}x{self.cols} với {other.rows}x{other.cols}.")
        out = []
        for i in range(self.rows):
            left = self.row(i)
            for j in range(other.cols):
                acc = ZERO
                for k, a in enumerate(left):
                    if a:
                        b = other.entries[k * other.cols + j]
                        if b:
                            acc = acc + a * b
                out.append(acc)
        return ExactMatrix(self.rows, other.cols, tuple(out))

    def apply(self, vector: Sequence[GaussRational]) -> Vector:
        """Nhân ma trận với vector cột."""
        if len(vector) != self.cols:
            raise DimensionMismatch(f"Vector độ dài {len(vector)} không khớp {self.cols} cột.")
        out = []
        for i in range(self.rows):
            acc = ZERO
            for a, x in zip(self.row(i), vector):
                if a and x:
                    acc = acc + a * x
            out.append(acc)
        return tuple(out)

    def conjugate_transpose(self) -> 'ExactMatrix':
        return ExactMatrix(self.cols, self.rows, tuple(
            self.entries[i * self.cols + j].conjugate() for j in range(self.cols) for i in range(self.rows)
        ))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def _same_shape(self, other: 'ExactMatrix'):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch(f"Kích thước khác nhau: {self.rows}x{self.cols} và {other.rows}x{other.cols}.")

    def __str__(self):
        return '[' + ', '.join('[' + ', '.join(str(x) for x in row) + ']' for row in self.to_rows()) + ']'


def _reduce(rows: List[List[GaussRational]], cols: int) -> List[int]:
    """Khử Gauss-Jordan tại chỗ; trả về danh sách cột pivot."""
    pivots = []
    pivot_row = 0
    for col in range(cols):
        found = next((r for r in range(pivot_row, len(rows)) if rows[r][col]), None)
        if found is None:
            continue
        rows[pivot_row], rows[found] = rows[found], rows[pivot_row]
        lead = rows[pivot_row][col]
        if lead != ONE:
            inverse = lead.inverse()
            rows[pivot_row] = [x * inverse if x else x for x in rows[pivot_row]]
        pivot = rows[pivot_row]
        for r in range(len(rows)):
            if r == pivot_row:
                continue
            factor = rows[r][col]
            if factor:
                rows[r] = [x - factor * p if p else x for x, p in zip(rows[r], pivot)]
        pivots.append(col)
        pivot_row += 1
        if pivot_row == len(rows):
            break
    return pivots


def echelon_basis(vectors: Iterable[Sequence[GaussRational]], cols: int) -> Tuple[Vector, ...]:
    """Cơ sở chính tắc (các hàng khác 0 của RREF) của không gian sinh bởi vectors."""
    rows = []
    for v in vectors:
        if len(v) != cols:
            raise DimensionMismatch(f"Vector độ dài {len(v)} không khớp {cols} cột.")
        if any(v):
            rows.append(list(v))
    pivots = _reduce(rows, cols)
    return tuple(tuple(rows[i]) for i in range(len(pivots)))


def rref(m: ExactMatrix) -> Tuple[ExactMatrix, int]:
    """Dạng bậc thang rút gọn duy nhất của m cùng hạng (số hàng khác 0)."""
    rows = [list(m.row(i)) for i in range(m.rows)]
    pivots = _reduce(rows, m.cols)
    reduced = ExactMatrix(m.rows, m.cols, tuple(x for row in rows for x in row))
    return reduced, len(pivots)


def _pivot_of(row: Sequence[GaussRational]) -> int:
    return next(i for i, x in enumerate(row) if x)


def reduce_against(v: Sequence[GaussRational], basis: Sequence[Vector]) -> Vector:
    """Phần dư của v sau khi khử theo một cơ sở ở dạng RREF."""
    residue = list(v)
    for row in basis:
        col = _pivot_of(row)
        factor = residue[col]
        if factor:
            residue = [x - factor * p if p else x for x, p in zip(residue, row)]
    return tuple(residue)


def in_row_space(v: Sequence, m: ExactMatrix) -> bool:
    """True khi v là tổ hợp tuyến tính của các hàng của m."""
    if len(v) != m.cols:
        raise DimensionMismatch(f"Vector độ dài {len(v)} không khớp {m.cols} cột.")
    v = [GaussRational.coerce(x) for x in v]
    basis = echelon_basis(m.to_rows(), m.cols)
    return not any(reduce_against(v, basis))


def express_in_rows(v: Sequence, rows: Sequence[Sequence[GaussRational]]) -> Optional[Vector]:
    """
    Tìm hệ số c sao cho v = Σ c_i·rows[i]; trả về None nếu v không thuộc không gian hàng.
    """
    if not rows:
        return () if not any(v) else None
    width = len(rows[0])
    if len(v) != width:
        raise DimensionMismatch(f"Vector độ dài {len(v)} không khớp {width} cột.")
    count = len(rows)
    augmented = [
        [GaussRational.coerce(x) for x in row] + [ONE if k == i else ZERO for k in range(count)]
        for i, row in enumerate(rows)
    ]
    pivots = _reduce(augmented, width + count)
    residue = [GaussRational.coerce(x) for x in v] + [ZERO] * count
    for r, col in enumerate(pivots):
        if col >= width:
            break
        factor = residue[col]
        if factor:
            residue = [x - factor * p if p else x for x, p in zip(residue, augmented[r])]
    if any(residue[:width]):
        return None
    return tuple(-c for c in residue[width:])
