import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .ExactMatrix import ExactMatrix, Vector, echelon_basis, express_in_rows, reduce_against
from .FiniteFrame import FiniteFrame
from .FiniteQuantale import FiniteQuantale, find_isomorphism
from .GaussRational import GaussRational, ZERO, ONE
from .LabCommon import (AlgebraMismatch, DimensionMismatch, Finding, NotDiagonal, NotRightIdeal,
                        lab_setting)
from .StarAlgebra import AlgElement, Algebra, StarHom
from .SupLattice import SupLattice

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Subspace:
    """
    Phần tử của Max A: không gian con trình bày bởi cơ sở RREF (chính tắc).
    Hai Subspace bằng nhau khi và chỉ khi cơ sở giống hệt nhau.
    """
    algebra: Algebra
    basis: Tuple[Vector, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence[GaussRational]) -> bool:
        if len(v) != self.algebra.dim:
            raise DimensionMismatch(f"Vector độ dài {len(v)} không thuộc {self.algebra}.")
        return not any(reduce_against(v, self.basis))

    def __le__(self, other: 'Subspace') -> bool:
        _same_algebra(self, other)
        return all(other.contains(v) for v in self.basis)

    def matrix(self) -> ExactMatrix:
        return ExactMatrix.from_rows(self.basis, cols=self.algebra.dim)

    def elements(self) -> List[AlgElement]:
        return [AlgElement.from_vector(self.algebra, v) for v in self.basis]

    def canonical(self) -> List[List[str]]:
        return [[str(x) for x in v] for v in self.basis]

    def __str__(self):
        if not self.basis:
            return '0'
        return '⟨' + '; '.join('(' + ', '.join(str(x) for x in v) + ')' for v in self.basis) + '⟩'


def _same_algebra(*spaces: Subspace):
    first = spaces[0].algebra
    for s in spaces[1:]:
        if s.algebra != first:
            raise AlgebraMismatch(f"Không gian con thuộc {first} và {s.algebra}.")


def span(algebra: Algebra, spanners: Iterable) -> Subspace:
    vectors = []
    for s in spanners:
        if isinstance(s, AlgElement):
            if s.algebra != algebra:
                raise AlgebraMismatch(f"Phần tử thuộc {s.algebra}, cần {algebra}.")
            s = s.vector()
        vectors.append(tuple(GaussRational.coerce(x) for x in s))
    return Subspace(algebra, echelon_basis(vectors, algebra.dim))


def bottom(algebra: Algebra) -> Subspace:
    return Subspace(algebra, ())


def top(algebra: Algebra) -> Subspace:
    return span(algebra, (algebra.basis_vector(t) for t in range(algebra.dim)))


def unit(algebra: Algebra) -> Subspace:
    return span(algebra, [algebra.identity()])


def msjoin(m: Subspace, n: Subspace) -> Subspace:
    _same_algebra(m, n)
    return span(m.algebra, m.basis + n.basis)


def msmeet(m: Subspace, n: Subspace) -> Subspace:
    """Giao theo thuật toán Zassenhaus: khử các hàng (m|m) và (n|0)."""
    _same_algebra(m, n)
    dim = m.algebra.dim
    rows = [v + v for v in m.basis] + [v + (ZERO,) * dim for v in n.basis]
    reduced = echelon_basis(rows, 2 * dim)
    return span(m.algebra, [row[dim:] for row in reduced if not any(row[:dim])])


def msproduct(m: Subspace, n: Subspace) -> Subspace:
    _same_algebra(m, n)
    a = m.algebra
    return span(a, [a.multiply(u, v) for u in m.basis for v in n.basis])


def msproduct_all(*spaces: Subspace) -> Subspace:
    acc = spaces[0]
    for s in spaces[1:]:
        acc = msproduct(acc, s)
    return acc


def msstar(m: Subspace) -> Subspace:
    return span(m.algebra, [m.algebra.star(v) for v in m.basis])


def is_right_ideal(m: Subspace) -> bool:
    return msproduct(m, top(m.algebra)) <= m


def is_left_ideal(m: Subspace) -> bool:
    return msproduct(top(m.algebra), m) <= m


def two_sided_closure(m: Subspace) -> Subspace:
    """Iđêan hai phía nhỏ nhất chứa M, tức A⊙M⊙A."""
    t = top(m.algebra)
    return msproduct(t, msproduct(m, t))


def gelfand_identity(m: Subspace) -> bool:
    if not is_right_ideal(m):
        raise NotRightIdeal(f"{m} không phải iđêan phải của {m.algebra}.")
    return msproduct_all(m, msstar(m), m) == m


class MaxMap:
    """Max f: M ↦ span{f(m)} cho một *-đồng cấu f."""

    def __init__(self, hom: StarHom):
        self.hom = hom.validated()

    def __call__(self, m: Subspace) -> Subspace:
        if m.algebra != self.hom.source:
            raise AlgebraMismatch(f"{m} không thuộc nguồn {self.hom.source} của '{self.hom.label}'.")
        return span(self.hom.target, [self.hom(v) for v in m.basis])

    def preimage(self, n: Subspace) -> Optional[Subspace]:
        """Một M với Max f(M) = N nếu mọi vector cơ sở của N nằm trong ảnh của f; ngược lại None."""
        coefficients = []
        for v in n.basis:
            solved = express_in_rows(v, self.hom.images)
            if solved is None:
                return None
            coefficients.append(solved)
        found = span(self.hom.source, coefficients)
        return found if self(found) == n else None


def max_functor(f: StarHom) -> MaxMap:
    return MaxMap(f)


def rs_functor(f: StarHom, j: Subspace) -> Subspace:
    """R f(J) = Max f(J) ⊙ ⊤ trong đích."""
    if not is_right_ideal(j):
        raise NotRightIdeal(f"{j} không phải iđêan phải của {j.algebra}.")
    return msproduct(max_functor(f)(j), top(f.target))


@dataclass(frozen=True)
class HilbertSubspace:
    """Không gian con của ℂ^dim (vector cột), cơ sở RREF."""
    dim: int
    basis: Tuple[Vector, ...]

    @classmethod
    def span(cls, dim: int, vectors: Iterable[Sequence]) -> 'HilbertSubspace':
        return cls(dim, echelon_basis([tuple(GaussRational.coerce(x) for x in v) for v in vectors], dim))

    @classmethod
    def full(cls, dim: int) -> 'HilbertSubspace':
        return cls.span(dim, [tuple(ONE if i == j else ZERO for j in range(dim)) for i in range(dim)])

    def join(self, other: 'HilbertSubspace') -> 'HilbertSubspace':
        return HilbertSubspace.span(self.dim, self.basis + other.basis)

    def __str__(self):
        return '⟨' + '; '.join('(' + ', '.join(str(x) for x in v) + ')' for v in self.basis) + '⟩' if self.basis else '0'


def hilbert_point_action(k: int, v: Subspace, w: HilbertSubspace) -> HilbertSubspace:
    """π̃(V)(W) = span{π(a)x : a ∈ cơ sở V, x ∈ cơ sở W}, π là phép chiếu lên khối k."""
    algebra = v.algebra
    algebra.check_block(k)
    n = algebra.blocks[k]
    if w.dim != n:
        raise DimensionMismatch(f"W nằm trong ℂ^{w.dim}, khối {k} tác động trên ℂ^{n}.")
    images = [algebra.block_of(a, k).apply(x) for a in v.basis for x in w.basis]
    return HilbertSubspace.span(n, images)


def hilbert_signature(v: Subspace, inputs: Optional[Dict[int, Sequence[HilbertSubspace]]] = None) -> Tuple:
    """Dấu vân tay của V qua mọi điểm Hilbert (mỗi khối) trên các không gian thử; mặc định thử toàn không gian."""
    algebra = v.algebra
    signature = []
    for k, n in enumerate(algebra.blocks):
        tests = inputs.get(k, ()) if inputs is not None else (HilbertSubspace.full(n),)
        signature.append(tuple(hilbert_point_action(k, v, w).basis for w in tests))
    return tuple(signature)


def _require_diagonal(algebra: Algebra):
    if not algebra.is_commutative:
        raise NotDiagonal(f"Đại số {algebra} không phải ℂⁿ.")


def diagonal_support(m: Subspace) -> Tuple[int, ...]:
    """Các tọa độ (đánh số từ 0) mà một vector cơ sở khác 0."""
    _require_diagonal(m.algebra)
    return tuple(i for i in range(m.algebra.dim) if any(v[i] for v in m.basis))


def coordinate_ideal(n: int, support: Iterable[int]) -> Subspace:
    algebra = Algebra.diagonal(n)
    return span(algebra, [algebra.basis_vector(i) for i in sorted(set(support))])


def primes_diagonal(n: int) -> List[Subspace]:
    """n siêu phẳng tọa độ I_x = {v : v_x = 0}."""
    return [coordinate_ideal(n, [i for i in range(n) if i != x]) for x in range(n)]


def support_criterion(n: int, support: Iterable[int]) -> bool:
    """
    Tiêu chuẩn nguyên tố theo giá: với mọi giá a, b, a∩b ⊆ s kéo theo a ⊆ s hoặc b ⊆ s.
    Dùng supp(a⊙1⊙b) = supp(a) ∩ supp(b); s = {0..n-1} bị loại như phần tử đỉnh.
    """
    s = frozenset(support)
    if len(s) == n:
        return False
    subsets = [frozenset(c) for r in range(n + 1) for c in combinations(range(n), r)]
    return all(a <= s or b <= s for a in subsets for b in subsets if a & b <= s)


@dataclass
class DiagonalSpatialization:
    n: int
    frame: FiniteFrame

    def quotient(self, m: Subspace) -> int:
        """Lớp của M trong 2ⁿ: giá của M."""
        mask = sum(1 << i for i in diagonal_support(m))
        return self.frame.index_of(mask)

    def agrees_with_closure(self, m: Subspace) -> bool:
        return two_sided_closure(m) == coordinate_ideal(self.n, diagonal_support(m))


def spatialization_diagonal(n: int) -> DiagonalSpatialization:
    return DiagonalSpatialization(n, FiniteFrame.boolean(n))


def quotient_by_signature(spaces: Sequence[Subspace], signature) -> Tuple[FiniteQuantale, List[int], List[Subspace]]:
    """
    Thương hữu hạn của một họ không gian con đóng với join và tích, đồng nhất theo signature.
    Trả về (quantale thương, nhãn lớp của từng phần tử, đại diện từng lớp).
    """
    labels, reps, seen = [], [], {}
    for m in spaces:
        key = signature(m)
        if key not in seen:
            seen[key] = len(reps)
            reps.append(m)
        labels.append(seen[key])

    def class_of(m: Subspace) -> int:
        key = signature(m)
        if key not in seen:
            raise DimensionMismatch(f"Họ không gian con không đóng: lớp của {m} chưa có.")
        return seen[key]

    join_table = [[class_of(msjoin(a, b)) for b in reps] for a in reps]
    product = [[class_of(msproduct(a, b)) for b in reps] for a in reps]
    star = [class_of(msstar(a)) for a in reps]
    algebra = spaces[0].algebra
    unit_class = class_of(unit(algebra))
    lattice = SupLattice.from_join_table(join_table, [str(r) for r in reps])
    quotient = FiniteQuantale(lattice, product, unit=unit_class, star=star, name=f"spat(Max {algebra.label})")
    return quotient, labels, reps


@dataclass
class PrimeRefutation:
    product: Subspace
    product_below: bool
    a_below: bool
    b_below: bool

    @property
    def refuted(self) -> bool:
        return self.product_below and not self.a_below and not self.b_below

    def as_dict(self) -> dict:
        return {'product': str(self.product), 'product_below': self.product_below,
                'a_below': self.a_below, 'b_below': self.b_below, 'refuted': self.refuted}


def refute_prime(p: Subspace, a: Subspace, b: Subspace) -> PrimeRefutation:
    """a⊙⊤⊙b ≤ P trong khi a ≰ P và b ≰ P bác bỏ tính nguyên tố của P."""
    _same_algebra(p, a, b)
    product = msproduct_all(a, top(p.algebra), b)
    return PrimeRefutation(product, product <= p, a <= p, b <= p)


@dataclass
class Reflection:
    algebra: Algebra
    frame: FiniteFrame
    commutator_ideal: Subspace


def commutative_reflection(algebra: Algebra) -> Reflection:
    """
    Thương giao hoán A/[A,A]: iđêan sinh bởi các giao hoán tử; phần còn lại là ℂ^c
    với c là số khối cỡ 1, frame các iđêan đóng là 2^c.
    """
    basis = [algebra.basis_vector(t) for t in range(algebra.dim)]
    commutators = []
    for u, v in combinations(basis, 2):
        uv, vu = algebra.multiply(u, v), algebra.multiply(v, u)
        commutators.append(tuple(x - y for x, y in zip(uv, vu)))
    ideal = two_sided_closure(span(algebra, commutators))
    c = algebra.dim - ideal.rank
    expected = sum(1 for n in algebra.blocks if n == 1)
    if c != expected:
        logger.warning(f"Đại số {algebra}: thương giao hoán có chiều {c}, khác số khối cỡ 1 ({expected}).")
    return Reflection(Algebra.diagonal(c), FiniteFrame.boolean(c), ideal)


def _zero_set(blocks: Iterable[frozenset]) -> frozenset:
    out = frozenset()
    for b in blocks:
        out |= b
    return out


# tập không của (z,z,w,w): {0,1} khi z=0, {2,3} khi w=0; của (z′,w′,z′,w′): {0,2}, {1,3}
GENERATOR_ZERO_BLOCKS = (frozenset({0, 1}), frozenset({2, 3}), frozenset({0, 2}), frozenset({1, 3}))


@dataclass
class CoproductObstruction:
    two_zero_rule: bool
    reachable_zero_sets: List[Tuple[int, ...]]
    targets: Dict[str, Dict[str, bool]] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        target = self.targets.get('(1,0,1,1)', {})
        return self.two_zero_rule and target.get('reachable') is False


def product_zero_sets() -> List[frozenset]:
    """Mọi tập không của tích tọa độ các bộ lấy xen kẽ từ hai ảnh sinh."""
    return sorted({_zero_set(c) for r in range(len(GENERATOR_ZERO_BLOCKS) + 1)
                   for c in combinations(GENERATOR_ZERO_BLOCKS, r)}, key=lambda s: (len(s), sorted(s)))


def is_rank_one_product(target: Sequence) -> bool:
    """(a,b,c,d) = (zz′, zw′, wz′, ww′) khi và chỉ khi ma trận [[a,b],[c,d]] có hạng ≤ 1, tức ad − bc = 0."""
    a, b, c, d = (GaussRational.coerce(x) for x in target)
    return a * d - b * c == ZERO


def coproduct_obstruction_check(targets: Optional[Sequence[Sequence[int]]] = None) -> CoproductObstruction:
    targets = targets or [(1, 0, 1, 1), (1, 0, 0, 1), (1, 1, 1, 1), (1, 0, 0, 0)]
    zero_sets = product_zero_sets()
    two_zero_rule = all(len(s) != 1 for s in zero_sets)
    verdict = CoproductObstruction(two_zero_rule, [tuple(sorted(s)) for s in zero_sets])
    for t in targets:
        zeros = frozenset(i for i, x in enumerate(t) if not x)
        verdict.targets['(' + ','.join(str(x) for x in t) + ')'] = {
            'zero_pattern_reachable': zeros in zero_sets,
            'reachable': is_rank_one_product(t),
        }
    logger.debug(f"Tập không đạt được: {verdict.reachable_zero_sets}.")
    return verdict


def product_obstruction() -> List[Subspace]:
    """Năm phần tử khác nhau của Max ℂ², trong khi Max ℂ × Max ℂ chỉ có 4."""
    c2 = Algebra.diagonal(2)
    return [bottom(c2), span(c2, [(1, 0)]), span(c2, [(0, 1)]), span(c2, [(1, 1)]), top(c2)]


def max_laws(m: Subspace, n: Subspace, k: Subspace) -> Finding:
    """Luật quantale của Max A trên một bộ ba; phản ví dụ là tên luật đầu tiên sai."""
    _same_algebra(m, n, k)
    algebra = m.algebra
    e, zero = unit(algebra), bottom(algebra)
    checks = (
        ('associativity', lambda: msproduct(msproduct(m, n), k) == msproduct(m, msproduct(n, k))),
        ('left-distributivity', lambda: msproduct(m, msjoin(n, k)) == msjoin(msproduct(m, n), msproduct(m, k))),
        ('right-distributivity', lambda: msproduct(msjoin(m, n), k) == msjoin(msproduct(m, k), msproduct(n, k))),
        ('empty-join', lambda: msproduct(m, zero) == zero and msproduct(zero, m) == zero),
        ('unit', lambda: msproduct(e, m) == m and msproduct(m, e) == m),
        ('involution', lambda: msstar(msstar(m)) == m
                                 and msstar(msproduct(m, n)) == msproduct(msstar(n), msstar(m))
                                 and msstar(msjoin(m, n)) == msjoin(msstar(m), msstar(n))),
    )
    for law, check in checks:
        if not check():
            return Finding(False, law)
    return Finding(True)


def max_hom_laws(f: MaxMap, m: Subspace, n: Subspace) -> Finding:
    """Max f bảo toàn join, tích, đơn vị và đối hợp trên cặp mẫu."""
    source = f.hom.source
    checks = (
        ('join', lambda: f(msjoin(m, n)) == msjoin(f(m), f(n))),
        ('product', lambda: f(msproduct(m, n)) == msproduct(f(m), f(n))),
        ('unit', lambda: f(unit(source)) == unit(f.hom.target)),
        ('star', lambda: f(msstar(m)) == msstar(f(m))),
    )
    for law, check in checks:
        if not check():
            return Finding(False, law)
    return Finding(True)


class SubspaceSampler:
    """Sinh ngẫu nhiên có seed: phần tử với hệ số Gauss nguyên trong [-2, 2], không gian con, phép chiếu, iđêan phải."""

    def __init__(self, algebra: Algebra, seed: Optional[int] = None):
        self.algebra = algebra
        self.seed = seed if seed is not None else lab_setting('QLAB_SEED')
        self.rng = np.random.default_rng(self.seed)

    def element(self) -> Vector:
        parts = self.rng.integers(-2, 3, size=(self.algebra.dim, 2))
        return tuple(GaussRational(int(re), int(im)) for re, im in parts)

    def subspace(self, rank: Optional[int] = None) -> Subspace:
        rank = int(self.rng.integers(0, self.algebra.dim + 1)) if rank is None else rank
        return span(self.algebra, [self.element() for _ in range(rank)])

    def projection(self) -> Vector:
        """Phép chiếu theo khối: 0, I hoặc v v*/⟨v,v⟩ với v ngẫu nhiên khác 0."""
        blocks = []
        for n in self.algebra.blocks:
            kind = int(self.rng.integers(0, 3 if n > 1 else 2))
            if kind == 0:
                blocks.append(ExactMatrix.zeros(n, n))
            elif kind == 1:
                blocks.append(ExactMatrix.identity(n))
            else:
                blocks.append(self._rank_one_projection(n))
        return self.algebra.from_blocks(blocks)

    def _rank_one_projection(self, n: int) -> ExactMatrix:
        while True:
            parts = self.rng.integers(-2, 3, size=(n, 2))
            v = [GaussRational(int(re), int(im)) for re, im in parts]
            norm = sum((x.norm() for x in v), Fraction(0))
            if norm:
                break
        scale = GaussRational(1 / norm)
        return ExactMatrix(n, n, tuple(scale * a * b.conjugate() for a in v for b in v))

    def right_ideal(self) -> Subspace:
        """p⊙⊤ với p là phép chiếu, hoặc span các phần tử ngẫu nhiên nhân ⊤."""
        t = top(self.algebra)
        if self.rng.integers(0, 2) == 0:
            return msproduct(span(self.algebra, [self.projection()]), t)
        count = int(self.rng.integers(0, 3))
        return msproduct(span(self.algebra, [self.element() for _ in range(count)]), t)


def right_sided_separated(m: Subspace, n: Subspace) -> bool:
    """Hai iđêan phải khác nhau được tách bởi tác động của một điểm Hilbert trên ℂ^{n_k}."""
    return hilbert_signature(m) != hilbert_signature(n)


def isomorphic_quantale(quotient: FiniteQuantale, frame: FiniteFrame) -> bool:
    return find_isomorphism(quotient, frame.to_quantale()) is not None


def example_subspaces() -> Dict[str, Subspace]:
    """
    Các không gian con có tên trong M₂ và ℂ²:
    P ma trận đối xứng, R hàng dưới bằng 0, L' cột phải bằng 0,
    L_push cột bằng nhau, R_push hàng bằng nhau, E, F các đường chéo của ℂ².
    """
    m2 = Algebra.matrices(2)
    c2 = Algebra.diagonal(2)

    def mat(*rows):
        return m2.from_blocks([ExactMatrix.from_rows(rows)])

    return {
        'P': span(m2, [mat([1, 0], [0, 0]), mat([0, 1], [1, 0]), mat([0, 0], [0, 1])]),
        'R': span(m2, [mat([1, 0], [0, 0]), mat([0, 1], [0, 0])]),
        "L'": span(m2, [mat([1, 0], [0, 0]), mat([0, 0], [1, 0])]),
        'E11': span(m2, [mat([1, 0], [0, 0])]),
        'L_push': span(m2, [mat([1, 1], [0, 0]), mat([0, 0], [1, 1])]),
        'R_push': span(m2, [mat([1, 0], [1, 0]), mat([0, 1], [0, 1])]),
        'E': span(c2, [(1, 1)]),
        'F': span(c2, [(1, -1)]),
        'diag': span(c2, [(1, 1)]),
    }


def diagonal_embedding() -> StarHom:
    """f: ℂ² -> M₂, (a, b) ↦ diag(a, b)."""
    c2, m2 = Algebra.diagonal(2), Algebra.matrices(2)
    return StarHom(c2, m2, ((ONE, ZERO, ZERO, ZERO), (ZERO, ZERO, ZERO, ONE)), label='diag')
