import logging
from dataclasses import dataclass
from functools import cached_property, reduce
from itertools import combinations, permutations, product
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .LabCommon import CapExceeded, NotAPartialOrder, NotComplete, lab_setting

logger = logging.getLogger(__name__)


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def transitive_closure(leq: np.ndarray) -> np.ndarray:
    """Bao đóng phản xạ - bắc cầu (Warshall) của một quan hệ bool n x n."""
    closed = np.array(leq, dtype=bool, copy=True)
    np.fill_diagonal(closed, True)
    for k in range(closed.shape[0]):
        closed |= closed[:, k:k + 1] & closed[k:k + 1, :]
    return closed


def check_partial_order(leq: np.ndarray):
    """Ném NotAPartialOrder kèm cặp/bộ ba vi phạm nếu leq không phải thứ tự bộ phận."""
    n = leq.shape[0]
    for x in range(n):
        if not leq[x, x]:
            raise NotAPartialOrder(f"Quan hệ không phản xạ tại phần tử {x}.", witness=(x,))
    both = leq & leq.T
    np.fill_diagonal(both, False)
    if both.any():
        x, y = (int(i) for i in np.argwhere(both)[0])
        raise NotAPartialOrder(f"Quan hệ không phản đối xứng: {x} ≤ {y} và {y} ≤ {x}.", witness=(x, y))
    composed = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
    broken = composed & ~leq
    if broken.any():
        x, z = (int(i) for i in np.argwhere(broken)[0])
        y = int(np.argwhere(leq[x] & leq[:, z])[0][0])
        raise NotAPartialOrder(f"Quan hệ không bắc cầu: {x} ≤ {y} ≤ {z} nhưng {x} ≰ {z}.", witness=(x, y, z))


def _extremal_bounds(bounds: np.ndarray, order: np.ndarray, score: np.ndarray):
    """
    Với mỗi cặp (x, y), chọn trong tập cận bounds[x, y, :] phần tử có score nhỏ nhất
    rồi kiểm tra nó thực sự là cận tốt nhất.
    Trả về (bảng kết quả, mặt nạ các cặp hợp lệ).
    """
    n = bounds.shape[0]
    scored = np.where(bounds, score[None, None, :], n + 1)
    best = scored.argmin(axis=-1)
    is_bound = np.take_along_axis(bounds, best[..., None], axis=-1)[..., 0]
    # order[best[x,y], w]: best đứng đúng phía so với mọi cận khác
    dominates = np.all(~bounds | order[best], axis=-1)
    return best, is_bound & dominates


class SupLattice:
    """
    Dàn đầy đủ hữu hạn trên các chỉ số 0..size-1.
    leq[x, y] nghĩa là x ≤ y; bảng join luôn được tính sẵn, bảng meet tính khi cần.
    """

    def __init__(self, leq: np.ndarray, join_table: np.ndarray, names: Optional[Sequence[str]] = None,
                 meet_table: Optional[np.ndarray] = None):
        self.leq = _readonly(np.array(leq, dtype=bool))
        self.join_table = _readonly(np.array(join_table, dtype=np.int64))
        self.size = int(self.leq.shape[0])
        if self.size == 0:
            raise NotComplete("Tập rỗng không có phần tử nhỏ nhất.", witness=())
        self.names = tuple(names) if names is not None else tuple(str(i) for i in range(self.size))
        self.bottom = int(np.argmax(self.leq.all(axis=1)))
        self.top = int(np.argmax(self.leq.all(axis=0)))
        if meet_table is not None:
            self.__dict__['meet_table'] = _readonly(np.array(meet_table, dtype=np.int64))

    @classmethod
    def from_leq(cls, size: int, leq, names: Optional[Sequence[str]] = None, close: bool = False) -> 'SupLattice':
        """
        Dựng dàn từ quan hệ thứ tự: leq là ma trận bool size x size hoặc danh sách cặp (x, y) với x ≤ y.
        close=True lấy bao đóng phản xạ - bắc cầu trước khi kiểm tra.
        """
        matrix = np.zeros((size, size), dtype=bool)
        if isinstance(leq, np.ndarray) and leq.shape == (size, size):
            matrix |= leq.astype(bool)
        else:
            for x, y in leq:
                matrix[x, y] = True
        if close:
            matrix = transitive_closure(matrix)
        check_partial_order(matrix)
        if size == 0:
            raise NotComplete("Tập rỗng không có phần tử nhỏ nhất.", witness=())

        down_count = matrix.sum(axis=0)
        upper = matrix[:, None, :] & matrix[None, :, :]
        join_table, ok = _extremal_bounds(upper, matrix, down_count)
        if not ok.all():
            x, y = (int(i) for i in np.argwhere(~ok)[0])
            raise NotComplete(f"Cặp ({x}, {y}) không có cận trên nhỏ nhất.", witness=(x, y))
        if not matrix.all(axis=1).any():
            raise NotComplete("Không có phần tử nhỏ nhất (join của tập rỗng).", witness=())
        return cls(matrix, join_table, names)

    @classmethod
    def from_join_table(cls, join_table, names: Optional[Sequence[str]] = None) -> 'SupLattice':
        table = np.array(join_table, dtype=np.int64)
        size = table.shape[0]
        leq = table == np.arange(size)[None, :]
        return cls.from_leq(size, leq, names)

    @classmethod
    def chain(cls, n: int) -> 'SupLattice':
        index = np.arange(n)
        return cls.from_leq(n, index[:, None] <= index[None, :])

    @classmethod
    def boolean(cls, atoms: int) -> 'SupLattice':
        masks = np.arange(1 << atoms)
        leq = (masks[:, None] & ~masks[None, :]) == 0
        return cls(leq, masks[:, None] | masks[None, :], meet_table=masks[:, None] & masks[None, :])

    @cached_property
    def meet_table(self) -> np.ndarray:
        up_count = self.leq.sum(axis=1)
        lower = self.leq.T[:, None, :] & self.leq.T[None, :, :]
        table, ok = _extremal_bounds(lower, self.leq.T, up_count)
        if not ok.all():
            x, y = (int(i) for i in np.argwhere(~ok)[0])
            raise NotComplete(f"Cặp ({x}, {y}) không có cận dưới lớn nhất.", witness=(x, y))
        return _readonly(table)

    @cached_property
    def down_count(self) -> np.ndarray:
        return _readonly(self.leq.sum(axis=0))

    def join(self, x: int, y: int) -> int:
        return int(self.join_table[x, y])

    def meet(self, x: int, y: int) -> int:
        return int(self.meet_table[x, y])

    def join_all(self, elements: Iterable[int]) -> int:
        return reduce(lambda acc, x: int(self.join_table[acc, x]), elements, self.bottom)

    def meet_all(self, elements: Iterable[int]) -> int:
        return reduce(lambda acc, x: int(self.meet_table[acc, x]), elements, self.top)

    def is_leq(self, x: int, y: int) -> bool:
        return bool(self.leq[x, y])

    def strictly_below(self, x: int) -> List[int]:
        return [y for y in range(self.size) if y != x and self.leq[y, x]]

    def subset_joins(self) -> np.ndarray:
        """Join của mọi tập con, đánh chỉ số theo bitmask."""
        joins = np.zeros(1 << self.size, dtype=np.int64)
        joins[0] = self.bottom
        for mask in range(1, 1 << self.size):
            low = mask & -mask
            joins[mask] = self.join_table[joins[mask ^ low], low.bit_length() - 1]
        return joins

    def __eq__(self, other):
        return (isinstance(other, SupLattice) and np.array_equal(self.leq, other.leq)
                and self.names == other.names)

    def __hash__(self):
        return hash((self.size, self.leq.tobytes(), self.names))

    def __repr__(self):
        return f"SupLattice(size={self.size}, names={list(self.names)})"

    def certificate(self) -> bytes:
        """
        Chứng chỉ chính tắc: hai dàn đẳng cấu khi và chỉ khi chứng chỉ bằng nhau.
        Chỉ hoán vị trong từng lớp phần tử có cùng (số phần tử dưới, số phần tử trên).
        """
        up_count = self.leq.sum(axis=1)
        signature = {x: (int(self.down_count[x]), int(up_count[x])) for x in range(self.size)}
        groups = {}
        for x in range(self.size):
            groups.setdefault(signature[x], []).append(x)
        ordered = [groups[key] for key in sorted(groups)]
        best = None
        for choice in product(*(permutations(group) for group in ordered)):
            order = [x for block in choice for x in block]
            encoded = np.packbits(self.leq[np.ix_(order, order)]).tobytes()
            if best is None or encoded < best:
                best = encoded
        return bytes([self.size]) + best


def join_irreducibles(lattice: SupLattice) -> List[int]:
    """Các phần tử khác join của tập các phần tử nằm hẳn bên dưới nó."""
    return [x for x in range(lattice.size) if lattice.join_all(lattice.strictly_below(x)) != x]


def lattices_up_to_iso(n: int) -> List[SupLattice]:
    """
    Liệt kê mọi dàn n phần tử sai khác đẳng cấu.
    Phần trong (bỏ đáy và đỉnh) được sinh như các poset gán nhãn tự nhiên.
    """
    if n <= 0:
        return []
    if n == 1:
        return [SupLattice.from_leq(1, [(0, 0)])]
    inner = n - 2
    pairs = list(combinations(range(inner), 2))
    found = {}
    for chosen in product((False, True), repeat=len(pairs)):
        relation = np.eye(inner, dtype=bool)
        for (x, y), flag in zip(pairs, chosen):
            relation[x, y] = flag
        if not np.array_equal(transitive_closure(relation), relation):
            continue
        leq = np.zeros((n, n), dtype=bool)
        leq[0, :] = True
        leq[:, n - 1] = True
        leq[1:n - 1, 1:n - 1] = relation
        try:
            lattice = SupLattice.from_leq(n, leq)
        except NotComplete:
            continue
        found.setdefault(lattice.certificate(), lattice)
    logger.debug(f"Có {len(found)} dàn {n} phần tử sai khác đẳng cấu.")
    return [found[key] for key in sorted(found)]


@dataclass(frozen=True)
class EndoMap:
    values: Tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.values[x]

    def preserves_joins(self, lattice: SupLattice) -> bool:
        """Kiểm tra f(⋁X) = ⋁f(X) trên mọi tập con X (kể cả tập rỗng)."""
        joins = lattice.subset_joins()
        image = np.asarray(self.values, dtype=np.int64)
        image_joins = np.zeros_like(joins)
        image_joins[0] = lattice.bottom
        for mask in range(1, len(joins)):
            low = mask & -mask
            image_joins[mask] = lattice.join_table[image_joins[mask ^ low], image[low.bit_length() - 1]]
        return bool(np.array_equal(image[joins], image_joins))


def _join_preserving_maps(lattice: SupLattice) -> List[EndoMap]:
    irreducibles = join_irreducibles(lattice)
    below = np.array([[lattice.leq[j, x] for j in irreducibles] for x in range(lattice.size)], dtype=bool)
    subset_joins = lattice.subset_joins()
    join = lattice.join_table
    maps = []
    rejected = 0
    for assignment in product(range(lattice.size), repeat=len(irreducibles)):
        values = np.array([
            lattice.join_all(a for a, flag in zip(assignment, below[x]) if flag)
            for x in range(lattice.size)
        ], dtype=np.int64)
        # lọc nhanh: join nhị phân
        if not np.array_equal(values[join], join[values[:, None], values[None, :]]):
            rejected += 1
            continue
        candidate = EndoMap(tuple(int(v) for v in values))
        image_joins = np.zeros_like(subset_joins)
        image_joins[0] = lattice.bottom
        for mask in range(1, len(subset_joins)):
            low = mask & -mask
            image_joins[mask] = join[image_joins[mask ^ low], values[low.bit_length() - 1]]
        if not np.array_equal(values[subset_joins], image_joins):
            rejected += 1
            continue
        maps.append(candidate)
    logger.debug(f"Dàn {lattice.size} phần tử: {len(maps)} ánh xạ bảo toàn join, loại {rejected} ứng viên.")
    return sorted(set(maps), key=lambda f: f.values)


def endo_quantale(lattice: SupLattice, cap: Optional[int] = None):
    """
    Quantale Q(S) của mọi tự đồng cấu bảo toàn join của S.
    Join theo từng điểm, tích f⊙g = g∘f, đơn vị là ánh xạ đồng nhất.
    """
    from .FiniteQuantale import EndoQuantale

    cap = cap if cap is not None else lab_setting('QLAB_ENDO_CAP')
    if lattice.size > cap:
        raise CapExceeded(f"Dàn có {lattice.size} phần tử, vượt giới hạn {cap} cho Q(S).")

    maps = _join_preserving_maps(lattice)
    index = {f.values: i for i, f in enumerate(maps)}
    table = np.array([f.values for f in maps], dtype=np.int64)
    count = len(maps)

    leq = np.all(lattice.leq[table[:, None, :], table[None, :, :]], axis=-1)
    pointwise_join = lattice.join_table[table[:, None, :], table[None, :, :]]
    join_table = np.array([[index[tuple(int(v) for v in pointwise_join[f, g])] for g in range(count)]
                           for f in range(count)], dtype=np.int64)
    # (f⊙g)(x) = g(f(x))
    composed = table[np.arange(count)[None, :, None], table[:, None, :]]
    product_table = np.array([[index[tuple(int(v) for v in composed[f, g])] for g in range(count)]
                              for f in range(count)], dtype=np.int64)
    unit = index[tuple(range(lattice.size))]
    names = ['(' + ','.join(lattice.names[v] for v in f.values) + ')' for f in maps]

    logger.info(f"Đã dựng Q(S) với {count} phần tử trên dàn {lattice.size} phần tử.")
    return EndoQuantale(SupLattice(leq, join_table, names), product_table, unit=unit,
                        carrier=lattice, maps=tuple(maps))


def order_signature(leq: np.ndarray) -> List[Tuple[int, int]]:
    return [(int(d), int(u)) for d, u in zip(leq.sum(axis=0), leq.sum(axis=1))]


def find_order_isomorphism(left: np.ndarray, right: np.ndarray, accept=None) -> Optional[Tuple[int, ...]]:
    """
    Tìm song ánh phi: left -> right bảo toàn và phản ánh thứ tự, bằng quay lui.
    accept(mapping) là điều kiện bổ sung kiểm tra trên ánh xạ đầy đủ (ví dụ bảo toàn tích).
    """
    if left.shape != right.shape:
        return None
    n = left.shape[0]
    left_sig, right_sig = order_signature(left), order_signature(right)
    if sorted(left_sig) != sorted(right_sig):
        return None
    order = sorted(range(n), key=lambda x: (left_sig[x], x))
    mapping = [-1] * n
    used = [False] * n

    def extend(depth: int) -> bool:
        if depth == n:
            return accept is None or accept(tuple(mapping))
        x = order[depth]
        for y in range(n):
            if used[y] or right_sig[y] != left_sig[x]:
                continue
            if any(left[x, z] != right[y, mapping[z]] or left[z, x] != right[mapping[z], y]
                   for z in order[:depth]):
                continue
            mapping[x], used[y] = y, True
            if extend(depth + 1):
                return True
            mapping[x], used[y] = -1, False
        return False

    return tuple(mapping) if extend(0) else None
