import json
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import pandas as pd

from .CorpusLoader import corpus_quantales, scenario_metadata
from .FiniteFrame import FiniteFrame
from .FiniteQuantale import primes, verify_axioms
from .LabCommon import QuantaleLabError, UnknownScenario, lab_setting
from .MaxSpectrum import (GENERATOR_ZERO_BLOCKS, Subspace, SubspaceSampler, bottom, commutative_reflection,
                          coordinate_ideal, coproduct_obstruction_check, diagonal_embedding, diagonal_support,
                          example_subspaces, hilbert_point_action, hilbert_signature, HilbertSubspace, is_right_ideal,
                          isomorphic_quantale, max_functor, msproduct, msproduct_all, primes_diagonal,
                          product_obstruction, quotient_by_signature, refute_prime, rs_functor, span,
                          spatialization_diagonal, support_criterion, top, two_sided_closure, unit)
from .Representation import kruml_crosscheck
from .StarAlgebra import Algebra, StarHom, diagonal_homs, projection_homs

logger = logging.getLogger(__name__)

PASS = 'pass'
FAIL = 'fail'


def _render(value: Any) -> str:
    if isinstance(value, (list, tuple)) and not isinstance(value, Subspace):
        return '[' + ', '.join(_render(v) for v in value) + ']'
    if isinstance(value, dict):
        return '{' + ', '.join(f"{k}: {_render(v)}" for k, v in value.items()) + '}'
    return str(value)


@dataclass
class Transcript:
    """Nhật ký từng bước: (bước, kết quả dạng chính tắc, đúng/sai hoặc None nếu chỉ ghi nhận)."""
    steps: List[Tuple[str, str, Optional[bool]]] = field(default_factory=list)

    def record(self, step: str, value: Any):
        self.steps.append((step, _render(value), None))

    def expect(self, step: str, condition: bool, value: Any = None) -> bool:
        condition = bool(condition)
        self.steps.append((step, _render(condition if value is None else value), condition))
        if not condition:
            logger.warning(f"Kiểm tra thất bại ở bước '{step}': {_render(value)}")
        return condition

    @property
    def passed(self) -> bool:
        return all(ok is not False for _, _, ok in self.steps) and any(ok for _, _, ok in self.steps)


@dataclass
class Report:
    name: str
    topic: str
    verdict: str
    transcript: List[Tuple[str, str, Optional[bool]]]
    seed: int
    parameters: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def as_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'topic': self.topic,
            'verdict': self.verdict,
            'seed': self.seed,
            'parameters': self.parameters,
            'transcript': [{'step': s, 'output': o, 'ok': ok} for s, o, ok in self.transcript],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), ensure_ascii=False, indent=2)

    def to_text(self) -> str:
        header = f"[{self.verdict.upper()}] {self.name} ({self.topic}) seed={self.seed}"
        if not self.transcript:
            return header
        df = pd.DataFrame(self.transcript, columns=['step', 'output', 'ok'])
        df['ok'] = df['ok'].map({True: 'ok', False: 'FAIL', None: ''})
        return header + '\n' + df.to_string(index=False)


@dataclass
class Scenario:
    name: str
    topic: str
    description: str
    parameters: Dict[str, Any]
    run: Callable[..., None]


_REGISTRY: Dict[str, Callable[..., None]] = {}


def scenario(name: str):
    def register(fn: Callable[..., None]):
        _REGISTRY[name] = fn
        return fn
    return register


def scenarios() -> Dict[str, Scenario]:
    metadata = scenario_metadata()
    found = {}
    for name, fn in _REGISTRY.items():
        meta = metadata.get(name, {})
        found[name] = Scenario(name, meta.get('topic', ''), meta.get('description', ''),
                               dict(meta.get('parameters', {})), fn)
    return found


def list_scenarios() -> List[Tuple[str, str]]:
    return sorted((s.name, s.topic) for s in scenarios().values())


def run_scenario(name: str, parameters: Optional[Dict[str, Any]] = None) -> Report:
    """
    Chạy một kịch bản theo tên. Tham số truyền vào ghi đè tham số mặc định trong scenarios.json.
    Lỗi thư viện trong lúc chạy được ghi vào transcript và cho kết quả fail.
    """
    available = scenarios()
    if name not in available:
        raise UnknownScenario(f"Không có kịch bản '{name}'. Các kịch bản: {', '.join(sorted(available))}.")
    entry = available[name]
    params = dict(entry.parameters)
    params.update({k: v for k, v in (parameters or {}).items() if v is not None})
    seed = int(params.pop('seed', lab_setting('QLAB_SEED')))

    logger.info(f"Bắt đầu kịch bản '{name}' với tham số {params}, seed={seed}.")
    transcript = Transcript()
    try:
        entry.run(transcript, seed=seed, **params)
    except QuantaleLabError as e:
        logger.error(f"Kịch bản '{name}' gặp lỗi: {e}", exc_info=True)
        transcript.expect('error', False, f"{type(e).__name__}: {e}")

    verdict = PASS if transcript.passed else FAIL
    logger.info(f"Kết thúc kịch bản '{name}': {verdict}.")
    return Report(name, entry.topic, verdict, list(transcript.steps), seed, params)


def run_all(parameters: Optional[Dict[str, Dict[str, Any]]] = None) -> List[Report]:
    parameters = parameters or {}
    return [run_scenario(name, parameters.get(name)) for name, _ in list_scenarios()]


@scenario('m2-not-spatial')
def _m2_not_spatial(t: Transcript, seed: int):
    ex = example_subspaces()
    p, r, l = ex['P'], ex['R'], ex["L'"]
    m2 = p.algebra
    t.record('P', p)
    t.record('R', r)
    t.record("L'", l)
    product = msproduct_all(r, top(m2), l)
    t.expect("R⊙⊤⊙L' = ⟨E11⟩", product == ex['E11'], product)
    refutation = refute_prime(p, r, l)
    t.expect("R⊙⊤⊙L' ≤ P", refutation.product_below)
    t.expect('R ≰ P', not refutation.a_below)
    t.expect("L' ≰ P", not refutation.b_below)
    t.expect('P cực đại (hạng dim-1)', p.rank == m2.dim - 1, p.rank)
    t.expect('P không nguyên tố', refutation.refuted)


@scenario('c2-diagonal-not-prime')
def _c2_diagonal_not_prime(t: Transcript, seed: int):
    c2 = Algebra.diagonal(2)
    d = example_subspaces()['diag']
    a, b = span(c2, [(1, 0)]), span(c2, [(0, 1)])
    t.record('D', d)
    t.expect('D cực đại (hạng 1 trong ℂ²)', d.rank == c2.dim - 1, d.rank)
    refutation = refute_prime(d, a, b)
    t.expect('a⊙⊤⊙b = 0', refutation.product == bottom(c2), refutation.product)
    t.expect('a ≰ D và b ≰ D', not refutation.a_below and not refutation.b_below)
    t.expect('D không nguyên tố', refutation.refuted)
    t.expect('D không thuộc các siêu phẳng tọa độ', d not in primes_diagonal(2))


@scenario('spatialization-cn')
def _spatialization_cn(t: Transcript, seed: int, n: int = 4, samples: int = 24):
    n, samples = int(n), int(samples)
    algebra = Algebra.diagonal(n)
    coordinate = [coordinate_ideal(n, [i for i in range(n) if (mask >> i) & 1]) for mask in range(1 << n)]
    sampler = SubspaceSampler(algebra, seed)
    sampled = [sampler.subspace() for _ in range(samples)]
    family = coordinate + sampled
    t.record('số không gian con trong họ', len(family))

    quotient, labels, reps = quotient_by_signature(family, hilbert_signature)
    t.expect(f"số lớp = 2^{n}", quotient.size == 1 << n, quotient.size)

    frame = FiniteFrame.boolean(n)
    t.expect(f"thương ≅ frame Boole 2^{n}", isomorphic_quantale(quotient, frame))

    spat = spatialization_diagonal(n)
    closure_ok = all(spat.agrees_with_closure(m) for m in family)
    t.expect('M ↦ 1⊙M⊙1 bằng iđêan tọa độ của giá', closure_ok)
    classwise = all(labels[i] == labels[coordinate.index(two_sided_closure(m))] for i, m in enumerate(family))
    t.expect('lớp của M = lớp của 1⊙M⊙1', classwise)

    prime_reps = {reps[p] for p in primes(quotient)}
    hyperplanes = set(primes_diagonal(n))
    t.record('nguyên tố của thương', sorted(diagonal_support(reps[p]) for p in primes(quotient)))
    t.expect('nguyên tố = các siêu phẳng tọa độ', prime_reps == hyperplanes)
    t.expect('siêu phẳng thỏa tiêu chuẩn giá',
             all(support_criterion(n, diagonal_support(h)) for h in hyperplanes))


def _pushout_products(t: Transcript) -> Tuple[Subspace, Subspace]:
    ex = example_subspaces()
    f = max_functor(diagonal_embedding())
    l, r = ex['L_push'], ex['R_push']
    fe, ff = f(ex['E']), f(ex['F'])
    t.record('(Max f)(E)', fe)
    t.record('(Max f)(F)', ff)
    collapse_e = msproduct_all(l, fe, r)
    collapse_f = msproduct_all(l, ff, r)
    m2 = l.algebra
    t.expect('L⊙(Max f)(E)⊙R = ⊤', collapse_e == top(m2), f"hạng {collapse_e.rank}")
    t.expect('L⊙(Max f)(F)⊙R = 0', collapse_f == bottom(m2), f"hạng {collapse_f.rank}")
    return collapse_e, collapse_f


def _identified_in_c2(t: Transcript) -> bool:
    ex = example_subspaces()
    spat = spatialization_diagonal(2)
    e_class, f_class = spat.quotient(ex['E']), spat.quotient(ex['F'])
    return t.expect('E ∼ F trong spat(Max ℂ²)', e_class == f_class,
                    f"{spat.frame.element_name(e_class)} / {spat.frame.element_name(f_class)}")


def _hilbert_nontrivial(t: Transcript) -> bool:
    m2 = Algebra.matrices(2)
    w = HilbertSubspace.full(2)
    identity_image = hilbert_point_action(0, unit(m2), w)
    zero_image = hilbert_point_action(0, bottom(m2), w)
    t.record('π̃(⟨I⟩)(ℂ²)', identity_image)
    t.record('π̃(0)(ℂ²)', zero_image)
    ok = t.expect('π̃(⟨I⟩) là đồng nhất', identity_image == w)
    ok &= t.expect('π̃ phân biệt ⟨I⟩ với 0', hilbert_signature(unit(m2)) != hilbert_signature(bottom(m2)))
    return ok


@scenario('pushout-collapse')
def _pushout_collapse(t: Transcript, seed: int):
    _identified_in_c2(t)
    _pushout_products(t)
    t.expect('pushout tầm thường: ⊤ = 0 sau khi đồng nhất E ∼ F', t.passed)


@scenario('spmax-m2-nontrivial')
def _spmax_m2_nontrivial(t: Transcript, seed: int):
    _hilbert_nontrivial(t)
    m2 = Algebra.matrices(2)
    ex = example_subspaces()
    w = HilbertSubspace.span(2, [(1, 0)])
    r, l = ex['R'], ex["L'"]
    left = hilbert_point_action(0, msproduct(r, l), w)
    right = hilbert_point_action(0, r, hilbert_point_action(0, l, w))
    t.expect("π̃(R⊙L')(W) = π̃(R)(π̃(L')(W))", left == right, left)
    t.expect('π̃ phân biệt ⊤ với 0', hilbert_signature(top(m2)) != hilbert_signature(bottom(m2)))


@scenario('no-natural-spatialization')
def _no_natural_spatialization(t: Transcript, seed: int):
    identified = _identified_in_c2(t)
    collapse_e, collapse_f = _pushout_products(t)
    nontrivial = _hilbert_nontrivial(t)
    # tính tự nhiên buộc ảnh của E, F trùng lớp trong spat(Max M2), kéo theo ⊤ ∼ 0
    m2 = Algebra.matrices(2)
    forced = identified and collapse_e == top(m2) and collapse_f == bottom(m2)
    separated = hilbert_signature(collapse_e) != hilbert_signature(collapse_f)
    t.expect('điểm Hilbert tách L⊙f(E)⊙R khỏi L⊙f(F)⊙R', separated)
    t.expect('mâu thuẫn: tự nhiên buộc ⊤ ∼ 0 nhưng spat(Max M2) khác tầm thường',
             forced and nontrivial and separated)


def _zero_set(v) -> frozenset:
    return frozenset(i for i, x in enumerate(v) if not x)


@scenario('coproduct-not-preserved')
def _coproduct_not_preserved(t: Transcript, seed: int):
    c2, c4 = Algebra.diagonal(2), Algebra.diagonal(4)
    gamma1 = StarHom.from_function(c2, c4, lambda v: (v[0], v[0], v[1], v[1]), label='γ1')
    gamma2 = StarHom.from_function(c2, c4, lambda v: (v[0], v[1], v[0], v[1]), label='γ2')
    atoms = [span(c2, [(1, 0)]), span(c2, [(0, 1)])]
    images1 = [max_functor(gamma1)(a) for a in atoms]
    images2 = [max_functor(gamma2)(a) for a in atoms]
    t.record('ảnh γ1', images1)
    t.record('ảnh γ2', images2)

    verdict = coproduct_obstruction_check()
    t.record('tập không đạt được', verdict.reachable_zero_sets)
    observed = {_zero_set(m.basis[0]) for m in images1 + images2}
    t.expect('tập không của ảnh sinh khớp bảng', observed == set(GENERATOR_ZERO_BLOCKS))
    products = [_zero_set(msproduct(a, b).basis[0]) for a in images1 for b in images2 if msproduct(a, b).rank]
    t.expect('tích ảnh sinh nằm trong các tập không đạt được',
             all(tuple(sorted(s)) in verdict.reachable_zero_sets for s in products))
    t.expect('có một số 0 kéo theo có ít nhất hai số 0', verdict.two_zero_rule)
    target = verdict.targets['(1,0,1,1)']
    t.expect('⟨(1,0,1,1)⟩ không đạt được', not target['reachable'] and not target['zero_pattern_reachable'], target)
    t.expect('Max không bảo toàn coproduct', verdict.holds)


@scenario('product-not-preserved')
def _product_not_preserved(t: Transcript, seed: int):
    elements = product_obstruction()
    t.record('phần tử của Max ℂ²', elements)
    c1 = Algebra.diagonal(1)
    product_size = len({bottom(c1), top(c1)}) ** 2
    t.record('|Max ℂ × Max ℂ|', product_size)
    t.expect('5 phần tử đôi một khác nhau', len(set(elements)) == 5, len(set(elements)))
    t.expect('|Max ℂ²| > |Max ℂ × Max ℂ|', len(set(elements)) > product_size)


@scenario('faithful-sample')
def _faithful_sample(t: Transcript, seed: int):
    c2 = Algebra.diagonal(2)
    atoms = [span(c2, [(1, 0)]), span(c2, [(0, 1)]), span(c2, [(1, 1)])]
    right_ideals = [a for a in atoms if is_right_ideal(a)]
    t.record('tập nguyên tử', atoms)
    for family_name, homs in (('ℂ² -> ℂ²', diagonal_homs(2, 2)), ('ℂ² -> M2', projection_homs())):
        t.expect(f"{family_name}: đồng cấu đôi một khác nhau", len(set(homs)) == len(homs), len(homs))
        images = {h.label: tuple(max_functor(h)(a) for a in atoms) for h in homs}
        t.expect(f"{family_name}: ảnh Max khác nhau", len(set(images.values())) == len(homs), len(homs))
        rs_images = {tuple(rs_functor(h, j) for j in right_ideals) for h in homs}
        t.expect(f"{family_name}: ảnh RS khác nhau", len(rs_images) == len(homs), len(rs_images))


@scenario('commutative-reflection')
def _commutative_reflection(t: Transcript, seed: int):
    mixed = Algebra((2, 1))
    refl = commutative_reflection(mixed)
    t.record('iđêan giao hoán tử của M2⊕C', refl.commutator_ideal)
    m2_block = span(mixed, [mixed.basis_vector(i) for i in range(4)])
    t.expect('iđêan giao hoán tử = khối M2', refl.commutator_ideal == m2_block)
    t.expect('phản xạ của M2⊕C là ℂ', refl.algebra == Algebra.diagonal(1), refl.algebra.label)
    t.expect('frame iđêan là 2', refl.frame.size == 2, refl.frame.size)

    simple = commutative_reflection(Algebra.matrices(2))
    t.expect('iđêan giao hoán tử của M2 là toàn bộ', simple.commutator_ideal == top(Algebra.matrices(2)))
    t.expect('phản xạ của M2 cho frame tầm thường', simple.frame.size == 1, simple.frame.size)


@scenario('kruml-crosscheck')
def _kruml_crosscheck(t: Transcript, seed: int, max_size: int = 6, carrier_cap: Optional[int] = None):
    checked = 0
    for q in corpus_quantales():
        if q.size > int(max_size) or not verify_axioms(q).is_quantale:
            continue
        record = kruml_crosscheck(q, int(carrier_cap) if carrier_cap is not None else None)
        checked += 1
        t.expect(f"{record.quantale} ({record.size} phần tử)", record.agree,
                 f"nguyên tố={record.spatial_by_primes}, tách={record.separated_by_points}, "
                 f"điểm={record.point_count}")
    t.expect('có quantale được kiểm tra', checked > 0, checked)
