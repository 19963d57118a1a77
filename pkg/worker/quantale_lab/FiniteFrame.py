import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .FiniteQuantale import FiniteQuantale, locale_of
from .LabCommon import Finding, QuantaleLabError
from .SupLattice import SupLattice, check_partial_order, find_order_isomorphism, join_irreducibles

logger = logging.getLogger(__name__)


class FiniteFrame:
    """
    Frame hữu hạn trình bày qua poset các điểm (phần tử bất khả quy join), theo đối ngẫu Birkhoff.
    Phần tử là các tập dưới (downset) của poset, lưu dạng bitmask và sắp theo (lực lượng, thành viên).
    """

    def __init__(self, points: Sequence[str], base_leq, name: Optional[str] = None):
        self.points = tuple(points)
        self.base_leq = np.array(base_leq, dtype=bool).reshape(len(self.points), len(self.points))
        self.base_leq.setflags(write=False)
        check_partial_order(self.base_leq)
        self.name = name or f"frame{len(self.points)}"

        n = len(self.points)
        down = [sum(1 << y for y in range(n) if self.base_leq[y, x]) for x in range(n)]
        self.principal = tuple(down)
        masks = [m for m in range(1 << n) if all(not (m >> x) & 1 or (down[x] & ~m) == 0 for x in range(n))]
        masks.sort(key=lambda m: (bin(m).count('1'), [x for x in range(n) if (m >> x) & 1]))
        self.elements: Tuple[int, ...] = tuple(masks)
        self._index: Dict[int, int] = {m: i for i, m in enumerate(masks)}
        logger.debug(f"Frame '{self.name}': {n} điểm, {len(masks)} phần tử.")

    @classmethod
    def boolean(cls, n: int) -> 'FiniteFrame':
        return cls([f"p{i}" for i in range(n)], np.eye(n, dtype=bool), name=f"boolean{1 << n}")

    @classmethod
    def chain(cls, length: int) -> 'FiniteFrame':
        """Chuỗi có length phần tử, tức tập dưới của một chuỗi length-1 điểm."""
        n = length - 1
        index = np.arange(n)
        return cls([f"c{i}" for i in range(n)], index[:, None] <= index[None, :], name=f"chain{length}")

    @classmethod
    def trivial(cls) -> 'FiniteFrame':
        return cls([], np.zeros((0, 0), dtype=bool), name='trivial')

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def bottom(self) -> int:
        return 0

    @property
    def top(self) -> int:
        return self._index[(1 << len(self.points)) - 1]

    def index_of(self, mask: int) -> int:
        return self._index[mask]

    def members(self, element: int) -> List[str]:
        mask = self.elements[element]
        return [p for x, p in enumerate(self.points) if (mask >> x) & 1]

    def element_name(self, element: int) -> str:
        return '{' + ','.join(self.members(element)) + '}'

    @cached_property
    def lattice(self) -> SupLattice:
        masks = np.asarray(self.elements, dtype=np.int64)
        lookup = np.full(1 << len(self.points), -1, dtype=np.int64)
        lookup[masks] = np.arange(len(masks))
        leq = (masks[:, None] & ~masks[None, :]) == 0
        return SupLattice(leq, lookup[masks[:, None] | masks[None, :]],
                          names=[self.element_name(i) for i in range(self.size)],
                          meet_table=lookup[masks[:, None] & masks[None, :]])

    def meet(self, a: int, b: int) -> int:
        return self._index[self.elements[a] & self.elements[b]]

    def join(self, a: int, b: int) -> int:
        return self._index[self.elements[a] | self.elements[b]]

    def to_quantale(self) -> FiniteQuantale:
        return locale_of(self.lattice, name=self.name)

    def __repr__(self):
        return f"FiniteFrame(name='{self.name}', points={list(self.points)}, size={self.size})"


def well_inside(frame: FiniteFrame, a_prime: int, a: int) -> Finding:
    """a′ ⋖ a: tồn tại b với a′∧b = 0 và a∨b = 1; trả về b đầu tiên tìm được."""
    for b in range(frame.size):
        if frame.meet(a_prime, b) == frame.bottom and frame.join(a, b) == frame.top:
            return Finding(True, b)
    return Finding(False)


def is_regular(frame: FiniteFrame) -> Finding:
    """Mọi a bằng join các a′ ⋖ a; phản ví dụ là phần tử đầu tiên vi phạm."""
    for a in range(frame.size):
        inside = [x for x in range(frame.size) if well_inside(frame, x, a)]
        if frame.lattice.join_all(inside) != a:
            return Finding(False, a)
    return Finding(True)


def is_boolean(frame: FiniteFrame) -> Finding:
    """Quét phần bù: mọi phần tử có phần bù."""
    for a in range(frame.size):
        if not any(frame.meet(a, b) == frame.bottom and frame.join(a, b) == frame.top for b in range(frame.size)):
            return Finding(False, a)
    return Finding(True)


def birkhoff_points(frame: FiniteFrame) -> np.ndarray:
    """Poset các phần tử bất khả quy join của dàn, với thứ tự cảm sinh."""
    irreducibles = join_irreducibles(frame.lattice)
    return frame.lattice.leq[np.ix_(irreducibles, irreducibles)]


def posets_isomorphic(left: np.ndarray, right: np.ndarray) -> bool:
    return find_order_isomorphism(np.asarray(left, dtype=bool), np.asarray(right, dtype=bool)) is not None


def frames_isomorphic(left: FiniteFrame, right: FiniteFrame) -> bool:
    return posets_isomorphic(left.base_leq, right.base_leq)


@dataclass
class Coproduct:
    frame: FiniteFrame
    inl: Tuple[int, ...]
    inr: Tuple[int, ...]


def frame_coproduct(left: FiniteFrame, right: FiniteFrame) -> Coproduct:
    """
    L1 ⊕ L2 = tập dưới của P1 × P2; ι1(D) = D × P2, ι2(E) = P1 × E.
    """
    n1, n2 = len(left.points), len(right.points)
    pairs = [(p, q) for p in range(n1) for q in range(n2)]
    leq = np.array([[left.base_leq[p, p2] and right.base_leq[q, q2] for (p2, q2) in pairs] for (p, q) in pairs],
                   dtype=bool).reshape(len(pairs), len(pairs))
    names = [f"{left.points[p]}*{right.points[q]}" for p, q in pairs]
    frame = FiniteFrame(names, leq, name=f"({left.name}+{right.name})")

    def embed(mask: int, side: int) -> int:
        bits = 0
        for k, (p, q) in enumerate(pairs):
            if (mask >> (p if side == 0 else q)) & 1:
                bits |= 1 << k
        return frame.index_of(bits)

    inl = tuple(embed(m, 0) for m in left.elements)
    inr = tuple(embed(m, 1) for m in right.elements)
    logger.info(f"Coproduct {left.name} ⊕ {right.name}: {frame.size} phần tử trên {len(pairs)} điểm.")
    return Coproduct(frame, inl, inr)


def frame_homs(source: FiniteFrame, target: FiniteFrame) -> List[Tuple[int, ...]]:
    """
    Mọi đồng cấu frame (bảo toàn join tùy ý và meet hữu hạn) source -> target.
    Ảnh được xác định bởi ảnh các tập dưới chính ↓p; đủ kiểm tra h(↓p)∧h(↓q) = h(↓p∩↓q).
    """
    n = len(source.points)
    order = sorted(range(n), key=lambda x: (bin(source.principal[x]).count('1'), x))
    value = [-1] * n
    found = []

    def image(mask: int) -> int:
        acc = target.bottom
        for x in range(n):
            if (mask >> x) & 1:
                acc = target.join(acc, value[x])
        return acc

    def extend(depth: int):
        if depth == n:
            if image((1 << n) - 1) == target.top:
                found.append(tuple(image(m) for m in source.elements))
            return
        x = order[depth]
        for candidate in range(target.size):
            value[x] = candidate
            if all(target.meet(candidate, value[y]) == image(source.principal[x] & source.principal[y])
                   for y in order[:depth + 1]):
                extend(depth + 1)
        value[x] = -1

    extend(0)
    return found


def verify_coproduct(left: FiniteFrame, right: FiniteFrame, coproduct: Coproduct,
                     test_frames: Sequence[FiniteFrame]) -> Finding:
    """
    Tính phổ dụng kiểm tra vét cạn: với mỗi frame thử M, mỗi cặp (f, g) có đúng một h với h∘ι1 = f, h∘ι2 = g.
    """
    for target in test_frames:
        expected = {(f, g) for f in frame_homs(left, target) for g in frame_homs(right, target)}
        factored: Dict[Tuple, int] = {}
        for h in frame_homs(coproduct.frame, target):
            pair = (tuple(h[i] for i in coproduct.inl), tuple(h[i] for i in coproduct.inr))
            factored[pair] = factored.get(pair, 0) + 1
        if set(factored) != expected:
            missing = next(iter(expected - set(factored)), None)
            return Finding(False, (target.name, 'missing', missing))
        duplicated = next((pair for pair, count in factored.items() if count > 1), None)
        if duplicated is not None:
            return Finding(False, (target.name, 'not-unique', duplicated))
        logger.debug(f"Tính phổ dụng đúng với frame thử '{target.name}': {len(expected)} cặp.")
    return Finding(True)


def check_generator_commutation(left: FiniteFrame, right: FiniteFrame, coproduct: Coproduct) -> bool:
    """ι1(a)⊙ι2(b) = ι2(b)⊙ι1(a) trong quantale của coproduct."""
    if len(coproduct.inl) != left.size or len(coproduct.inr) != right.size:
        raise QuantaleLabError("Coprojection không khớp kích thước các frame thành phần.")
    q = coproduct.frame.to_quantale()
    return all(q.mul(a, b) == q.mul(b, a) for a in coproduct.inl for b in coproduct.inr)
