from django.test import SimpleTestCase, override_settings

from worker.quantale_lab.CorpusLoader import load_subspace
from worker.quantale_lab.GaussRational import ZERO
from worker.quantale_lab.LabCommon import (AlgebraMismatch, BadBlockIndex, CorpusFormatError, DimensionMismatch,
                                           InvalidHomomorphism, NotDiagonal, NotRightIdeal, lab_setting)
from worker.quantale_lab.MaxSpectrum import (HilbertSubspace, SubspaceSampler, bottom, commutative_reflection,
                                             coordinate_ideal, coproduct_obstruction_check, diagonal_embedding,
                                             diagonal_support, example_subspaces, gelfand_identity,
                                             hilbert_point_action, is_left_ideal, is_right_ideal, max_functor,
                                             max_hom_laws, max_laws, msjoin, msmeet, msproduct, msproduct_all,
                                             msstar, primes_diagonal, product_obstruction, product_zero_sets,
                                             refute_prime, right_sided_separated, rs_functor, span,
                                             spatialization_diagonal, support_criterion, top, two_sided_closure,
                                             unit)
from worker.quantale_lab.StarAlgebra import (Algebra, StarHom, diagonal_homs, inner_automorphism, projection_homs,
                                             standard_unitary)

ALGEBRAS = ('blocks=[1,1]', 'blocks=[1,1,1,1]', 'blocks=[2]', 'blocks=[2,1]')


class AlgebraTests(SimpleTestCase):

    def test_parse(self):
        self.assertEqual(Algebra.parse('blocks=[2,1]').blocks, (2, 1))
        self.assertEqual(Algebra.parse(' blocks = [ 3 ] ').blocks, (3,))
        self.assertEqual(Algebra.parse('blocks=[]').dim, 0)
        self.assertEqual(Algebra.parse('blocks=[2,1]').label, 'M2+C')
        self.assertEqual(Algebra.diagonal(2).label, 'C^2')
        for text in ('M2', 'blocks=[0]', 'blocks=[2,]', 'blocks=(2)'):
            with self.subTest(text=text):
                with self.assertRaises(ValueError):
                    Algebra.parse(text)

    def test_block_index(self):
        with self.assertRaises(BadBlockIndex):
            Algebra.matrices(2).check_block(1)
        with self.assertRaises(IndexError):
            Algebra.matrices(2).basis_index(-1, 0, 0)

    def test_homomorphism_families(self):
        self.assertEqual(len(diagonal_homs(2, 2)), 4)
        self.assertEqual(len(diagonal_homs(2, 3)), 8)
        for f in diagonal_homs(2, 2) + projection_homs():
            with self.subTest(hom=f.label):
                self.assertTrue(f.verify())
        self.assertEqual(len(set(projection_homs())), 7)

    def test_non_homomorphism_rejected(self):
        c2 = Algebra.diagonal(2)
        bad = StarHom.from_function(c2, c2, lambda v: (v[0], ZERO), 'bad')
        self.assertEqual(bad.verify(), (False, ('unit',)))
        with self.assertRaises(InvalidHomomorphism):
            max_functor(bad)
        with self.assertRaises(DimensionMismatch):
            StarHom(c2, c2, ((ZERO,),))

    def test_inner_automorphism(self):
        m2 = Algebra.matrices(2)
        ad = inner_automorphism(m2, [standard_unitary(2)])
        self.assertTrue(ad.verify())
        e11 = example_subspaces()['E11']
        moved = max_functor(ad)(e11)
        self.assertEqual(moved.rank, 1)
        self.assertNotEqual(moved, e11)
        self.assertTrue(inner_automorphism(Algebra.parse('blocks=[2,1,3]'),
                                           [standard_unitary(2), standard_unitary(1), standard_unitary(3)]).verify())


class SubspaceTests(SimpleTestCase):

    def setUp(self):
        self.named = example_subspaces()
        self.m2 = Algebra.matrices(2)

    def test_corpus_subspaces_match_named(self):
        self.assertEqual(load_subspace('m2-top-row.json', self.m2), self.named['R'])
        self.assertEqual(load_subspace('m2-left-column.json', self.m2), self.named["L'"])
        self.assertEqual(load_subspace('m2-symmetric.json', self.m2), self.named['P'])
        with self.assertRaises(CorpusFormatError):
            load_subspace('m2-top-row.json', Algebra.diagonal(4))

    def test_lattice_operations(self):
        p, r, l = self.named['P'], self.named['R'], self.named["L'"]
        self.assertEqual(msmeet(p, r), self.named['E11'])
        self.assertEqual(msjoin(r, l).rank, 3)
        self.assertEqual(msstar(r), l)
        self.assertTrue(bottom(self.m2) <= p <= top(self.m2))
        self.assertEqual(str(bottom(self.m2)), '0')
        with self.assertRaises(AlgebraMismatch):
            msjoin(r, self.named['E'])
        with self.assertRaises(DimensionMismatch):
            r.contains((ZERO,) * 3)

    def test_products_and_sides(self):
        r, l = self.named['R'], self.named["L'"]
        self.assertEqual(msproduct(r, l), self.named['E11'])
        self.assertEqual(msproduct(l, r), top(self.m2))
        self.assertTrue(is_right_ideal(r))
        self.assertFalse(is_right_ideal(l))
        self.assertTrue(is_left_ideal(l))
        self.assertEqual(two_sided_closure(self.named['E11']), top(self.m2))

    def test_symmetric_matrices_are_not_prime(self):
        named = self.named
        refutation = refute_prime(named['P'], named['R'], named["L'"])
        self.assertTrue(refutation.refuted)
        self.assertEqual(refutation.product, named['E11'])
        self.assertTrue(refutation.as_dict()['refuted'])
        self.assertFalse(refute_prime(named['P'], named['R'], named['R']).refuted)

    def test_gelfand_identity(self):
        self.assertTrue(gelfand_identity(self.named['R']))
        with self.assertRaises(NotRightIdeal):
            gelfand_identity(self.named["L'"])
        m2c = Algebra.parse('blocks=[2,1]')
        projection = load_subspace('m2c-projection.json', m2c)
        self.assertTrue(gelfand_identity(msproduct(projection, top(m2c))))

    def test_unit_subspace(self):
        c2 = Algebra.diagonal(2)
        self.assertEqual(unit(c2), load_subspace('c2-diagonal.json', c2))
        self.assertFalse(is_right_ideal(unit(c2)))
        self.assertEqual(msproduct_all(unit(self.m2), self.named['P'], unit(self.m2)), self.named['P'])


class ConfiguredSampleTests(SimpleTestCase):
    """Luật quantale và đẳng thức Gelfand với số mẫu và seed cấu hình (mặc định 200, QLAB_SEED)."""

    def test_quantale_laws_on_samples(self):
        for text in ALGEBRAS:
            algebra = Algebra.parse(text)
            sampler = SubspaceSampler(algebra)
            self.assertEqual(sampler.seed, lab_setting('QLAB_SEED'))
            for _ in range(lab_setting('QLAB_SAMPLE_COUNT')):
                m, n, k = sampler.subspace(), sampler.subspace(), sampler.subspace()
                found = max_laws(m, n, k)
                self.assertTrue(found, msg=f"{algebra}: {found.witness} tại {m}, {n}, {k}")

    def test_gelfand_on_sampled_right_ideals(self):
        for text in ALGEBRAS:
            sampler = SubspaceSampler(Algebra.parse(text))
            for _ in range(lab_setting('QLAB_SAMPLE_COUNT')):
                ideal = sampler.right_ideal()
                self.assertTrue(is_right_ideal(ideal))
                self.assertTrue(gelfand_identity(ideal), msg=str(ideal))


@override_settings(QLAB_SAMPLE_COUNT=40)
class SampledLawTests(SimpleTestCase):

    def test_hilbert_action_respects_products(self):
        for text in ('blocks=[2]', 'blocks=[2,1]'):
            algebra = Algebra.parse(text)
            sampler = SubspaceSampler(algebra, seed=3)
            for _ in range(lab_setting('QLAB_SAMPLE_COUNT')):
                v, w = sampler.subspace(), sampler.subspace()
                for k, n in enumerate(algebra.blocks):
                    line = HilbertSubspace.span(n, [sampler.element()[:n]])
                    self.assertEqual(hilbert_point_action(k, msproduct(v, w), line),
                                     hilbert_point_action(k, v, hilbert_point_action(k, w, line)))

    def test_distinct_right_ideals_are_separated(self):
        sampler = SubspaceSampler(Algebra.parse('blocks=[2,1]'), seed=5)
        ideals = {}
        for _ in range(lab_setting('QLAB_SAMPLE_COUNT')):
            ideal = sampler.right_ideal()
            ideals[ideal.basis] = ideal
        ideals = list(ideals.values())
        for i, m in enumerate(ideals):
            for n in ideals[i + 1:]:
                self.assertTrue(right_sided_separated(m, n), msg=f"{m} / {n}")

    def test_max_functor_laws(self):
        homs = [diagonal_embedding()] + projection_homs()
        sampler = SubspaceSampler(Algebra.diagonal(2), seed=13)
        for f in homs:
            functor = max_functor(f)
            for _ in range(10):
                m, n = sampler.subspace(), sampler.subspace()
                self.assertTrue(max_hom_laws(functor, m, n), msg=f.label)


class HilbertPointTests(SimpleTestCase):

    def test_action_on_full_space(self):
        named = example_subspaces()
        full = HilbertSubspace.full(2)
        self.assertEqual(hilbert_point_action(0, named['R'], full), HilbertSubspace.span(2, [(1, 0)]))
        self.assertEqual(hilbert_point_action(0, named["L'"], full), full)
        self.assertFalse(right_sided_separated(named['P'], top(Algebra.matrices(2))))
        bottom_row = span(Algebra.matrices(2), [(0, 0, 1, 0), (0, 0, 0, 1)])
        self.assertTrue(is_right_ideal(bottom_row))
        self.assertTrue(right_sided_separated(named['R'], bottom_row))

    def test_action_errors(self):
        named = example_subspaces()
        with self.assertRaises(BadBlockIndex):
            hilbert_point_action(1, named['R'], HilbertSubspace.full(2))
        with self.assertRaises(DimensionMismatch):
            hilbert_point_action(0, named['R'], HilbertSubspace.full(3))


class FunctorTests(SimpleTestCase):

    def test_preimage(self):
        f = max_functor(diagonal_embedding())
        named = example_subspaces()
        self.assertEqual(f.preimage(named['E11']), span(Algebra.diagonal(2), [(1, 0)]))
        self.assertIsNone(f.preimage(named['R']))
        with self.assertRaises(AlgebraMismatch):
            f(named['R'])

    def test_right_sided_functor(self):
        f = diagonal_embedding()
        c2 = Algebra.diagonal(2)
        self.assertEqual(rs_functor(f, span(c2, [(1, 0)])), example_subspaces()['R'])
        with self.assertRaises(NotRightIdeal):
            rs_functor(f, unit(c2))

    def test_composition(self):
        f = diagonal_embedding()
        ad = inner_automorphism(Algebra.matrices(2), [standard_unitary(2)])
        composed = f.then(ad)
        self.assertTrue(composed.verify())
        with self.assertRaises(AlgebraMismatch):
            ad.then(f)


class DiagonalTests(SimpleTestCase):

    def test_support_and_coordinate_ideals(self):
        c3 = Algebra.diagonal(3)
        m = span(c3, [(1, 0, 2)])
        self.assertEqual(diagonal_support(m), (0, 2))
        self.assertEqual(two_sided_closure(m), coordinate_ideal(3, [0, 2]))
        with self.assertRaises(NotDiagonal):
            diagonal_support(example_subspaces()['R'])

    def test_support_criterion(self):
        self.assertTrue(support_criterion(3, {0, 1}))
        self.assertFalse(support_criterion(3, {0}))
        self.assertFalse(support_criterion(3, {0, 1, 2}))
        self.assertTrue(support_criterion(1, set()))
        for n in (2, 3, 4):
            for ideal in primes_diagonal(n):
                self.assertTrue(support_criterion(n, diagonal_support(ideal)))
            self.assertEqual(len(primes_diagonal(n)), n)

    def test_spatialization_of_diagonal(self):
        spatial = spatialization_diagonal(3)
        c3 = Algebra.diagonal(3)
        self.assertEqual(spatial.frame.size, 8)
        self.assertEqual(spatial.quotient(coordinate_ideal(3, [0, 2])), spatial.frame.index_of(0b101))
        m = span(c3, [(1, 1, 0)])
        self.assertEqual(spatial.quotient(m), spatial.frame.index_of(0b011))
        self.assertTrue(spatial.agrees_with_closure(m))

    def test_commutative_reflection(self):
        self.assertEqual(commutative_reflection(Algebra.matrices(2)).frame.size, 1)
        self.assertEqual(commutative_reflection(Algebra.parse('blocks=[2,1]')).frame.size, 2)
        reflection = commutative_reflection(Algebra.diagonal(2))
        self.assertEqual(reflection.frame.size, 4)
        self.assertEqual(reflection.commutator_ideal.rank, 0)


class ObstructionTests(SimpleTestCase):

    def test_coproduct_obstruction(self):
        verdict = coproduct_obstruction_check()
        self.assertTrue(verdict.holds)
        self.assertFalse(verdict.targets['(1,0,1,1)']['zero_pattern_reachable'])
        self.assertTrue(verdict.targets['(1,1,1,1)']['reachable'])
        self.assertTrue(all(len(s) != 1 for s in product_zero_sets()))
        # không có đích (1,0,1,1) thì không kết luận được
        self.assertFalse(coproduct_obstruction_check([(1, 1, 1, 1)]).holds)

    def test_product_obstruction(self):
        spaces = product_obstruction()
        self.assertEqual(len(set(spaces)), 5)
        self.assertEqual([s.rank for s in spaces], [0, 1, 1, 1, 2])
