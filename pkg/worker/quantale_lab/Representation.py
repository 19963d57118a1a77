import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .FiniteQuantale import EndoQuantale, FiniteQuantale, QuantaleHom, check_hom, is_spatial_by_primes
from .LabCommon import CapExceeded, Finding, InvalidHomomorphism, MissingStructure, lab_setting
from .SupLattice import SupLattice, endo_quantale, join_irreducibles, lattices_up_to_iso

logger = logging.getLogger(__name__)


class Representation:
    """
    Biểu diễn r: Q -> Q(S) cùng tác động module x·a := r(a)(x).
    Đồng cấu được kiểm tra khi khởi tạo.
    """

    def __init__(self, source: FiniteQuantale, target: EndoQuantale, hom_map: Sequence[int], validate: bool = True):
        self.source = source
        self.target = target
        self.carrier: SupLattice = target.carrier
        self.hom = QuantaleHom(source, target, tuple(int(v) for v in hom_map))
        if validate:
            report = check_hom(self.hom)
            if not report.holds:
                raise InvalidHomomorphism(f"Biểu diễn của '{source.name}' trên S{self.carrier.size} "
                                          f"không là đồng cấu: {report.witness}.")

    def __call__(self, a: int) -> int:
        return self.hom(a)

    def act(self, x: int, a: int) -> int:
        return self.target.maps[self.hom(a)].values[x]

    @property
    def is_zero(self) -> bool:
        return all(v == self.target.bottom for v in self.hom.map)

    def describe(self) -> dict:
        return {
            'carrier_size': self.carrier.size,
            'carrier': list(self.carrier.names),
            'images': [list(self.target.maps[v].values) for v in self.hom.map],
        }

    def __repr__(self):
        return f"Representation(source='{self.source.name}', carrier={self.carrier.size}, map={self.hom.map})"


def is_irreducible(r: Representation) -> bool:
    """x·1 ≤ x kéo theo x = 0 hoặc x = 1 trong dàn mang."""
    s = r.carrier
    return all(x in (s.bottom, s.top) for x in range(s.size) if s.is_leq(r.act(x, r.source.top), x))


def is_strong(r: Representation) -> bool:
    return r.hom(r.source.top) == r.target.top


def is_pre_unital(r: Representation) -> bool:
    if r.source.unit is None:
        raise MissingStructure(f"Quantale '{r.source.name}' không có đơn vị.")
    e = r.source.unit
    return all(r.carrier.is_leq(x, r.act(x, e)) for x in range(r.carrier.size))


def action_laws(r: Representation) -> Finding:
    """x·(a⊙b) = (x·a)·b, (x∨y)·a = x·a ∨ y·a và 0·a = 0."""
    q, s = r.source, r.carrier
    for a in range(q.size):
        if r.act(s.bottom, a) != s.bottom:
            return Finding(False, ('bottom', a))
        for x in range(s.size):
            for b in range(q.size):
                if r.act(x, q.mul(a, b)) != r.act(r.act(x, a), b):
                    return Finding(False, ('product', x, a, b))
            for y in range(s.size):
                if r.act(s.join(x, y), a) != s.join(r.act(x, a), r.act(y, a)):
                    return Finding(False, ('join', x, y, a))
    return Finding(True)


def _homomorphisms(source: FiniteQuantale, target: FiniteQuantale) -> List[Tuple[int, ...]]:
    """
    Mọi đồng cấu (bảo toàn join và tích) source -> target, tìm bằng quay lui.
    Ảnh được xác định bởi giá trị trên các phần tử bất khả quy join, gán theo một mở rộng tuyến tính.
    """
    lat = source.lattice
    irreducibles = sorted(join_irreducibles(lat), key=lambda j: (int(lat.down_count[j]), j))
    stage_of_irr = {j: s for s, j in enumerate(irreducibles)}
    below = [[j for j in irreducibles if lat.leq[j, x]] for x in range(source.size)]
    stage = [max((stage_of_irr[j] for j in below[x]), default=-1) for x in range(source.size)]

    join_checks = [[] for _ in irreducibles]
    product_checks = [[] for _ in irreducibles]
    for x in range(source.size):
        for y in range(source.size):
            z = lat.join(x, y)
            s = max(stage[x], stage[y], stage[z])
            if s >= 0:
                join_checks[s].append((x, y, z))
            z = source.mul(x, y)
            s = max(stage[x], stage[y], stage[z])
            if s >= 0:
                product_checks[s].append((x, y, z))
            elif target.product[target.bottom, target.bottom] != target.bottom:
                return []

    t_join, t_mul, t_leq = target.lattice.join_table, target.product, target.lattice.leq
    candidates_all = np.arange(target.size)
    found = []
    values = [target.bottom if stage[x] < 0 else -1 for x in range(source.size)]

    def extend(s: int):
        if s == len(irreducibles):
            found.append(tuple(values))
            return
        j = irreducibles[s]
        partial = target.bottom
        for k in below[j]:
            if k != j:
                partial = t_join[partial, values[k]]
        candidates = candidates_all[t_leq[partial, candidates_all]]
        fresh = [x for x in range(source.size) if stage[x] == s]
        arrays = {}
        for x in fresh:
            base = target.bottom
            for k in below[x]:
                if k != j:
                    base = t_join[base, values[k]]
            arrays[x] = t_join[base, candidates]

        def value(x):
            return arrays[x] if x in arrays else np.full(len(candidates), values[x])

        mask = np.ones(len(candidates), dtype=bool)
        for x, y, z in join_checks[s]:
            mask &= value(z) == t_join[value(x), value(y)]
        for x, y, z in product_checks[s]:
            mask &= value(z) == t_mul[value(x), value(y)]
        for i in np.flatnonzero(mask):
            for x in fresh:
                values[x] = int(arrays[x][i])
            extend(s + 1)
        for x in fresh:
            values[x] = -1

    extend(0)
    return found


@lru_cache(maxsize=None)
def _carriers(size: int) -> Tuple[Tuple[SupLattice, EndoQuantale], ...]:
    return tuple((s, endo_quantale(s, cap=size)) for s in lattices_up_to_iso(size))


def _check_caps(q: FiniteQuantale, carrier_cap: int):
    source_cap = lab_setting('QLAB_POINT_SOURCE_CAP')
    if q.size > source_cap:
        raise CapExceeded(f"Quantale '{q.name}' có {q.size} phần tử, vượt giới hạn {source_cap}.")
    configured = lab_setting('QLAB_CARRIER_CAP')
    if carrier_cap > configured:
        raise CapExceeded(f"Giới hạn dàn mang {carrier_cap} vượt cấu hình QLAB_CARRIER_CAP={configured}.")


def enumerate_representations(q: FiniteQuantale, carrier_cap: Optional[int] = None) -> List[Representation]:
    """Mọi biểu diễn của q trên các dàn |S| ≤ carrier_cap, sai khác đẳng cấu dàn mang, thứ tự xác định."""
    carrier_cap = carrier_cap if carrier_cap is not None else lab_setting('QLAB_CARRIER_CAP')
    _check_caps(q, carrier_cap)
    result = []
    for size in range(1, carrier_cap + 1):
        for carrier, target in _carriers(size):
            homs = _homomorphisms(q, target)
            logger.debug(f"'{q.name}' -> Q(S{size}) [{len(target.maps)} phần tử]: {len(homs)} đồng cấu.")
            result.extend(Representation(q, target, h, validate=False) for h in sorted(homs))
    logger.info(f"Quantale '{q.name}': {len(result)} biểu diễn trên dàn mang tới {carrier_cap} phần tử.")
    return result


def enumerate_points(q: FiniteQuantale, carrier_cap: Optional[int] = None,
                     include_zero: bool = False) -> List[Representation]:
    """Các biểu diễn bất khả quy (điểm); biểu diễn không bị loại trừ khi include_zero=False."""
    return [r for r in enumerate_representations(q, carrier_cap)
            if is_irreducible(r) and (include_zero or not r.is_zero)]


def separates(q: FiniteQuantale, points: Sequence) -> Finding:
    """Họ điểm tách mọi cặp phần tử khác nhau; phản ví dụ là cặp không tách được."""
    signature = {}
    for a in range(q.size):
        key = tuple(p(a) for p in points)
        if key in signature:
            return Finding(False, (signature[key], a))
        signature[key] = a
    return Finding(True)


@dataclass
class KrumlRecord:
    quantale: str
    size: int
    spatial_by_primes: bool
    separated_by_points: bool
    point_count: int
    prime_witness: Optional[int] = None
    separation_witness: Optional[Tuple[int, int]] = None

    @property
    def agree(self) -> bool:
        return self.spatial_by_primes == self.separated_by_points


def kruml_crosscheck(q: FiniteQuantale, carrier_cap: Optional[int] = None) -> KrumlRecord:
    """So sánh tiêu chuẩn meet-của-nguyên-tố với việc các điểm bất khả quy tách phần tử."""
    spatial = is_spatial_by_primes(q)
    points = enumerate_points(q, carrier_cap)
    separated = separates(q, points)
    record = KrumlRecord(q.name, q.size, spatial.holds, separated.holds, len(points),
                         spatial.witness, separated.witness)
    if not record.agree:
        logger.warning(f"Kruml cross-check lệch trên '{q.name}': nguyên tố={spatial.holds}, tách={separated.holds}.")
    return record
