import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .LabCommon import Finding, InvalidHomomorphism, MissingStructure
from .SupLattice import EndoMap, SupLattice, find_order_isomorphism

logger = logging.getLogger(__name__)


class FiniteQuantale:
    """
    Quantale hữu hạn: dàn đầy đủ + bảng tích, tùy chọn đơn vị và phép đối hợp (star).
    Các phần tử là chỉ số 0..size-1 của dàn.
    """

    def __init__(self, lattice: SupLattice, product, unit: Optional[int] = None,
                 star: Optional[Sequence[int]] = None, name: Optional[str] = None):
        self.lattice = lattice
        self.product = np.array(product, dtype=np.int64)
        self.product.setflags(write=False)
        if self.product.shape != (lattice.size, lattice.size):
            raise ValueError(f"Bảng tích có kích thước {self.product.shape}, cần {(lattice.size, lattice.size)}.")
        self.unit = unit
        self.star = tuple(int(s) for s in star) if star is not None else None
        self.name = name or f"Q{lattice.size}"

    @property
    def size(self) -> int:
        return self.lattice.size

    @property
    def bottom(self) -> int:
        return self.lattice.bottom

    @property
    def top(self) -> int:
        return self.lattice.top

    @property
    def names(self) -> Tuple[str, ...]:
        return self.lattice.names

    def mul(self, *elements: int) -> int:
        """Tích trái sang phải a1⊙a2⊙...; tích rỗng cần đơn vị."""
        if not elements:
            if self.unit is None:
                raise MissingStructure(f"Quantale '{self.name}' không có đơn vị.")
            return self.unit
        acc = elements[0]
        for x in elements[1:]:
            acc = int(self.product[acc, x])
        return acc

    def join(self, a: int, b: int) -> int:
        return self.lattice.join(a, b)

    def leq(self, a: int, b: int) -> bool:
        return self.lattice.is_leq(a, b)

    def same_tables(self, other: 'FiniteQuantale') -> bool:
        """Cùng bảng join, tích, đơn vị và star (bỏ qua tên)."""
        return (self.size == other.size and self.unit == other.unit and self.star == other.star
                and np.array_equal(self.lattice.join_table, other.lattice.join_table)
                and np.array_equal(self.product, other.product))

    def __repr__(self):
        return f"FiniteQuantale(name='{self.name}', size={self.size}, unit={self.unit}, star={self.star})"


class EndoQuantale(FiniteQuantale):
    """Q(S): phần tử thứ i là tự đồng cấu maps[i] của dàn carrier."""

    def __init__(self, lattice: SupLattice, product, unit: int, carrier: SupLattice, maps: Tuple[EndoMap, ...]):
        super().__init__(lattice, product, unit=unit, name=f"Q(S{carrier.size})")
        self.carrier = carrier
        self.maps = maps
        self._index = {f.values: i for i, f in enumerate(maps)}

    def index_of(self, values: Sequence[int]) -> int:
        return self._index[tuple(values)]


@dataclass(frozen=True)
class QuantaleHom:
    source: FiniteQuantale
    target: FiniteQuantale
    map: Tuple[int, ...]

    def __call__(self, a: int) -> int:
        return self.map[a]

    @classmethod
    def identity(cls, quantale: FiniteQuantale) -> 'QuantaleHom':
        return cls(quantale, quantale, tuple(range(quantale.size)))

    def then(self, other: 'QuantaleHom') -> 'QuantaleHom':
        """Hợp thành: trước self, sau other."""
        return QuantaleHom(self.source, other.target, tuple(other.map[x] for x in self.map))


@dataclass
class Violation:
    law: str
    witness: Tuple[int, ...]


@dataclass
class ClassificationReport:
    is_quantale: bool
    unital: bool
    strong: bool
    involutive: Optional[bool]
    gelfand: Optional[bool]
    strictly_two_sided: bool
    locale: bool
    trivial: bool
    violation: Optional[Violation] = None

    def as_dict(self) -> Dict:
        return asdict(self)


@dataclass
class HomReport:
    joins: bool
    product: bool
    unital: Optional[bool] = None
    pre_unital: Optional[bool] = None
    strong: Optional[bool] = None
    involutive: Optional[bool] = None
    witness: Optional[Tuple] = None

    @property
    def holds(self) -> bool:
        return all(flag is not False for flag in (self.joins, self.product, self.unital,
                                                   self.pre_unital, self.strong, self.involutive))

    def as_dict(self) -> Dict:
        return asdict(self)


def _first(mask: np.ndarray) -> Optional[Tuple[int, ...]]:
    if not mask.any():
        return None
    return tuple(int(i) for i in np.argwhere(mask)[0])


def _law_violations(q: FiniteQuantale):
    """Sinh ra (tên luật, phản ví dụ) theo thứ tự kiểm tra."""
    n, p, j = q.size, q.product, q.lattice.join_table
    idx = np.arange(n)

    left = p[p[:, :, None], idx[None, None, :]]
    right = p[idx[:, None, None], p[None, :, :]]
    yield 'associativity', _first(left != right)

    # a⊙(b∨c) = (a⊙b)∨(a⊙c), a⊙0 = 0
    witness = _first(p[:, q.bottom] != q.bottom)
    if witness is None:
        witness = _first(p[idx[:, None, None], j[None, :, :]] != j[p[:, :, None], p[:, None, :]])
    yield 'left-distributivity', witness

    # (b∨c)⊙a = (b⊙a)∨(c⊙a), 0⊙a = 0
    witness = _first(p[q.bottom, :] != q.bottom)
    if witness is None:
        witness = _first(p[j[None, :, :], idx[:, None, None]] != j[p.T[:, :, None], p.T[:, None, :]])
    yield 'right-distributivity', witness

    if q.unit is not None:
        yield 'unit', _first((p[q.unit, :] != idx) | (p[:, q.unit] != idx))

    if q.star is not None:
        s = np.asarray(q.star, dtype=np.int64)
        witness = _first(s[s] != idx)
        if witness is None:
            witness = _first(s[p] != p.T[s[:, None], s[None, :]])
        if witness is None:
            witness = _first(s[j] != j[s[:, None], s[None, :]])
        if witness is None and s[q.bottom] != q.bottom:
            witness = (q.bottom,)
        yield 'involution', witness


def verify_axioms(q: FiniteQuantale) -> ClassificationReport:
    """
    Kiểm tra vét cạn các tiên đề quantale và phân loại.
    Vi phạm là dữ liệu: violation chứa luật đầu tiên bị vi phạm cùng phản ví dụ.
    """
    failed = {}
    violation = None
    for law, witness in _law_violations(q):
        if witness is not None:
            failed[law] = witness
            if violation is None:
                violation = Violation(law, witness)

    is_quantale = not any(law in failed for law in ('associativity', 'left-distributivity', 'right-distributivity'))
    unital = q.unit is not None and 'unit' not in failed
    involutive = None if q.star is None else 'involution' not in failed
    gelfand = None
    if unital and involutive:
        gelfand = is_gelfand(q).holds
    strictly_two_sided = unital and q.unit == q.top
    locale = is_quantale and strictly_two_sided and np.array_equal(q.product, q.lattice.meet_table)

    report = ClassificationReport(
        is_quantale=is_quantale,
        unital=unital,
        strong=int(q.product[q.top, q.top]) == q.top,
        involutive=involutive,
        gelfand=gelfand,
        strictly_two_sided=strictly_two_sided,
        locale=bool(locale),
        trivial=q.size == 1,
        violation=violation,
    )
    if violation is not None:
        logger.debug(f"Quantale '{q.name}' vi phạm luật {violation.law} tại {violation.witness}.")
    return report


def is_idempotent_product(q: FiniteQuantale) -> bool:
    return bool(np.array_equal(np.diagonal(q.product), np.arange(q.size)))


def sided_elements(q: FiniteQuantale, side: str) -> List[int]:
    leq = q.lattice.leq
    idx = np.arange(q.size)
    right = leq[q.product[:, q.top], idx]
    left = leq[q.product[q.top, :], idx]
    if side == 'right':
        mask = right
    elif side == 'left':
        mask = left
    elif side == 'two':
        mask = right & left
    else:
        raise ValueError(f"Phía không hợp lệ: '{side}' (chỉ nhận right, left, two).")

    if side == 'right' and q.unit is not None and not right_sided_matches_unit(q):
        logger.warning(f"Quantale '{q.name}': R(Q) khác Q⊙1, đơn vị khai báo có thể sai.")
    return [int(x) for x in np.flatnonzero(mask)]


def right_sided_matches_unit(q: FiniteQuantale) -> Finding:
    """
    Với quantale có đơn vị, R(Q) = Q⊙1. Nhân chứng là phần tử thuộc đúng một trong hai tập.
    """
    if q.unit is None:
        raise MissingStructure(f"Quantale '{q.name}' không có đơn vị.")
    image = set(int(x) for x in q.product[:, q.top])
    right = set(int(x) for x in np.flatnonzero(q.lattice.leq[q.product[:, q.top], np.arange(q.size)]))
    extra = sorted(image ^ right)
    return Finding(True) if not extra else Finding(False, extra[0])


def is_gelfand(q: FiniteQuantale) -> Finding:
    """a⊙a*⊙a = a với mọi phần tử phía phải a."""
    if q.unit is None or q.star is None:
        raise MissingStructure(f"Quantale '{q.name}' cần cả đơn vị và phép đối hợp để kiểm tra tính Gelfand.")
    for a in sided_elements(q, 'right'):
        if q.mul(a, q.star[a], a) != a:
            return Finding(False, a)
    return Finding(True)


def primes(q: FiniteQuantale) -> List[int]:
    """
    Các phần tử nguyên tố p: a⊙1⊙b ≤ p kéo theo a ≤ p hoặc b ≤ p.
    Đỉnh bị loại trừ trừ khi quantale tầm thường.
    """
    if q.size == 1:
        return [q.bottom]
    leq = q.lattice.leq
    triple = q.product[q.product[:, q.top][:, None], np.arange(q.size)[None, :]]
    # below[a, b, p]: a⊙1⊙b ≤ p
    below = leq[triple]
    escapes = below & ~leq[:, None, :] & ~leq[None, :, :]
    found = [p for p in range(q.size) if p != q.top and not escapes[:, :, p].any()]
    return found


def is_spatial_by_primes(q: FiniteQuantale) -> Finding:
    """Mọi phần tử là meet của các phần tử nguyên tố; phản ví dụ là phần tử cao nhất không biểu diễn được."""
    prime_set = primes(q)
    order = sorted(range(q.size), key=lambda a: (-int(q.lattice.down_count[a]), a))
    for a in order:
        above = [p for p in prime_set if q.leq(a, p)]
        if q.lattice.meet_all(above) != a:
            return Finding(False, a)
    return Finding(True)


def check_hom(h: QuantaleHom, unital: bool = False, pre_unital: bool = False,
              strong: bool = False, involutive: bool = False) -> HomReport:
    """Luôn kiểm tra bảo toàn join và tích; các cờ còn lại chỉ kiểm tra khi được yêu cầu."""
    src, tgt = h.source, h.target
    f = np.asarray(h.map, dtype=np.int64)
    report = HomReport(joins=True, product=True)
    if f.shape != (src.size,) or f.min(initial=0) < 0 or f.max(initial=0) >= tgt.size:
        report.joins = report.product = False
        report.witness = ('shape',)
        return report

    bad = _first(f[src.lattice.join_table] != tgt.lattice.join_table[f[:, None], f[None, :]])
    if f[src.bottom] != tgt.bottom:
        bad = (src.bottom,)
    if bad is not None:
        report.joins = False
        report.witness = ('joins',) + bad
    bad = _first(f[src.product] != tgt.product[f[:, None], f[None, :]])
    if bad is not None:
        report.product = False
        report.witness = report.witness or ('product',) + bad

    has_units = src.unit is not None and tgt.unit is not None
    if unital:
        report.unital = has_units and int(f[src.unit]) == tgt.unit
    if pre_unital:
        report.pre_unital = has_units and tgt.leq(tgt.unit, int(f[src.unit]))
    if strong:
        report.strong = int(f[src.top]) == tgt.top
    if involutive:
        if src.star is None or tgt.star is None:
            report.involutive = None
        else:
            report.involutive = all(f[src.star[a]] == tgt.star[int(f[a])] for a in range(src.size))
    return report


def _as_hom(point) -> QuantaleHom:
    if isinstance(point, QuantaleHom):
        return point
    hom = getattr(point, 'hom', None)
    if isinstance(hom, QuantaleHom):
        return hom
    raise InvalidHomomorphism(f"Điểm {point!r} không phải đồng cấu quantale.")


def congruence_is_sound(q: FiniteQuantale, label: Sequence[int]) -> Finding:
    """Phép toán trên lớp không phụ thuộc đại diện: label(a∨b), label(a⊙b) chỉ phụ thuộc label(a), label(b)."""
    seen_join, seen_mul = {}, {}
    for a in range(q.size):
        for b in range(q.size):
            key = (label[a], label[b])
            if seen_join.setdefault(key, label[q.join(a, b)]) != label[q.join(a, b)]:
                return Finding(False, ('join', a, b))
            if seen_mul.setdefault(key, label[q.mul(a, b)]) != label[q.mul(a, b)]:
                return Finding(False, ('product', a, b))
    return Finding(True)


def spatialize(q: FiniteQuantale, points: Sequence) -> Tuple[FiniteQuantale, QuantaleHom]:
    """
    Thương Q/∼ với a ∼ b khi mọi điểm p_i cho p_i(a) = p_i(b).
    Mỗi lớp mang nhãn là đại diện nhỏ nhất; trả về (thương, toàn ánh chính tắc).
    """
    homs = [_as_hom(p) for p in points]
    for h in homs:
        if h.source is not q and not h.source.same_tables(q):
            raise InvalidHomomorphism(f"Điểm có nguồn '{h.source.name}' khác quantale '{q.name}'.")
        report = check_hom(h)
        if not report.holds:
            raise InvalidHomomorphism(f"Điểm vào '{h.target.name}' không bảo toàn join/tích: {report.witness}.")

    signature = [tuple(h.map[a] for h in homs) for a in range(q.size)]
    representative = {}
    for a in range(q.size):
        representative.setdefault(signature[a], a)
    reps = sorted(representative.values())
    position = {rep: i for i, rep in enumerate(reps)}
    label = [position[representative[signature[a]]] for a in range(q.size)]

    sound = congruence_is_sound(q, label)
    if not sound:
        raise InvalidHomomorphism(f"Quan hệ tương đương không phải đồng dư tại {sound.witness}.")

    k = len(reps)
    join_table = [[label[q.join(a, b)] for b in reps] for a in reps]
    product = [[label[q.mul(a, b)] for b in reps] for a in reps]
    lattice = SupLattice.from_join_table(join_table, [q.names[a] for a in reps])

    star = None
    if q.star is not None and homs and all(check_hom(h, involutive=True).involutive for h in homs):
        star = [label[q.star[a]] for a in reps]
    unit = label[q.unit] if q.unit is not None else None

    quotient = FiniteQuantale(lattice, product, unit=unit, star=star, name=f"spat({q.name})")
    logger.info(f"Spatialization của '{q.name}' qua {len(homs)} điểm: {q.size} -> {k} lớp.")
    return quotient, QuantaleHom(q, quotient, tuple(label))


def localic_reflection_map(q: FiniteQuantale) -> Tuple[List[int], Tuple[int, ...]]:
    """Ánh xạ đóng a ↦ 1⊙a⊙1 và ảnh của nó."""
    mapping = tuple(q.mul(q.top, a, q.top) for a in range(q.size))
    return sorted(set(mapping)), mapping


def below_unit_closed(q: FiniteQuantale) -> Finding:
    """{a : a ≤ e} đóng với tích, join và phép đối hợp."""
    if q.unit is None or q.star is None:
        raise MissingStructure(f"Quantale '{q.name}' cần đơn vị và phép đối hợp.")
    below = [a for a in range(q.size) if q.leq(a, q.unit)]
    for a in below:
        if not q.leq(q.star[a], q.unit):
            return Finding(False, ('star', a))
        for b in below:
            if not q.leq(q.mul(a, b), q.unit):
                return Finding(False, ('product', a, b))
            if not q.leq(q.join(a, b), q.unit):
                return Finding(False, ('join', a, b))
    return Finding(True)


def commuting_idempotents_law(q: FiniteQuantale) -> Finding:
    """Hai lũy đẳng giao hoán a, b thỏa a⊙b⊙a⊙b = a⊙b."""
    idempotents = [a for a in range(q.size) if q.mul(a, a) == a]
    for a in idempotents:
        for b in idempotents:
            if q.mul(a, b) == q.mul(b, a) and q.mul(a, b, a, b) != q.mul(a, b):
                return Finding(False, (a, b))
    return Finding(True)


def locale_of(lattice: SupLattice, name: Optional[str] = None) -> FiniteQuantale:
    """Locale như quantale: tích là meet, đơn vị là đỉnh, đối hợp tầm thường."""
    return FiniteQuantale(lattice, lattice.meet_table, unit=lattice.top,
                          star=range(lattice.size), name=name or f"locale{lattice.size}")


def trivial_quantale() -> FiniteQuantale:
    lattice = SupLattice.from_leq(1, [(0, 0)], names=['0'])
    return FiniteQuantale(lattice, [[0]], unit=0, star=[0], name='trivial')


def find_isomorphism(left: FiniteQuantale, right: FiniteQuantale) -> Optional[Tuple[int, ...]]:
    """Song ánh bảo toàn thứ tự, tích, đơn vị và (nếu có) đối hợp; None nếu không tồn tại."""
    if (left.unit is None) != (right.unit is None) or (left.star is None) != (right.star is None):
        return None

    def accept(mapping):
        f = np.asarray(mapping, dtype=np.int64)
        if not np.array_equal(f[left.product], right.product[f[:, None], f[None, :]]):
            return False
        if left.unit is not None and f[left.unit] != right.unit:
            return False
        if left.star is not None and any(f[left.star[a]] != right.star[int(f[a])] for a in range(left.size)):
            return False
        return True

    return find_order_isomorphism(left.lattice.leq, right.lattice.leq, accept)
