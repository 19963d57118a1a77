import numpy as np
from django.test import SimpleTestCase

from worker.quantale_lab.CorpusLoader import corpus_lattices, load_lattice
from worker.quantale_lab.LabCommon import CapExceeded, NotAPartialOrder, NotComplete
from worker.quantale_lab.SupLattice import (EndoMap, SupLattice, endo_quantale, find_order_isomorphism,
                                            join_irreducibles, lattices_up_to_iso)
from worker.quantale_lab.FiniteQuantale import verify_axioms


class SupLatticeTests(SimpleTestCase):

    def test_chain_joins_and_meets(self):
        chain = SupLattice.chain(4)
        self.assertEqual(chain.bottom, 0)
        self.assertEqual(chain.top, 3)
        self.assertEqual(chain.join(1, 2), 2)
        self.assertEqual(chain.meet(1, 2), 1)
        self.assertEqual(chain.join_all([]), 0)
        self.assertEqual(chain.meet_all([]), 3)

    def test_from_leq_pairs_with_closure(self):
        lattice = load_lattice('pentagon.json')
        a, b, c = (lattice.names.index(x) for x in ('a', 'b', 'c'))
        self.assertTrue(lattice.is_leq(0, b))
        self.assertEqual(lattice.join(a, c), lattice.top)
        self.assertEqual(lattice.meet(b, c), lattice.bottom)

    def test_missing_join_reports_witness(self):
        # hai phần tử tối đại không có đỉnh chung
        with self.assertRaises(NotComplete) as ctx:
            SupLattice.from_leq(3, [(0, 1), (0, 2)], close=True)
        self.assertEqual(set(ctx.exception.witness), {1, 2})

    def test_not_a_partial_order(self):
        with self.assertRaises(NotAPartialOrder):
            SupLattice.from_leq(2, [(0, 0), (1, 1), (0, 1), (1, 0)])
        with self.assertRaises(NotAPartialOrder):
            SupLattice.from_leq(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)])

    def test_join_irreducibles(self):
        self.assertEqual(join_irreducibles(SupLattice.boolean(2)), [1, 2])
        self.assertEqual(join_irreducibles(SupLattice.chain(4)), [1, 2, 3])
        m3 = load_lattice('m3.json')
        self.assertEqual([m3.names[x] for x in join_irreducibles(m3)], ['p', 'r', 'l'])

    def test_lattice_counts_up_to_isomorphism(self):
        self.assertEqual([len(lattices_up_to_iso(n)) for n in range(1, 6)], [1, 1, 1, 2, 5])

    def test_certificate_is_label_independent(self):
        left = SupLattice.from_leq(4, [(0, 1), (0, 2), (1, 3), (2, 3)], close=True)
        right = SupLattice.from_leq(4, [(3, 1), (3, 2), (1, 0), (2, 0)], close=True)
        self.assertEqual(left.certificate(), right.certificate())
        self.assertNotEqual(left.certificate(), SupLattice.chain(4).certificate())
        self.assertIsNotNone(find_order_isomorphism(left.leq, SupLattice.boolean(2).leq))

    def test_corpus_lattices_load(self):
        sizes = sorted(l.size for l in corpus_lattices())
        self.assertEqual(sizes, [1, 2, 3, 4, 5, 5])


class EndoQuantaleTests(SimpleTestCase):

    def test_sizes(self):
        self.assertEqual(endo_quantale(SupLattice.chain(2)).size, 2)
        self.assertEqual(endo_quantale(SupLattice.chain(3)).size, 6)
        self.assertEqual(endo_quantale(SupLattice.boolean(2)).size, 16)

    def test_cap(self):
        with self.assertRaises(CapExceeded):
            endo_quantale(SupLattice.boolean(3), cap=6)

    def test_every_map_preserves_joins(self):
        lattice = load_lattice('m3.json')
        q = endo_quantale(lattice)
        self.assertTrue(all(f.preserves_joins(lattice) for f in q.maps))
        # ánh xạ hằng 1 không giữ đáy
        self.assertFalse(EndoMap((4, 4, 4, 4, 4)).preserves_joins(lattice))

    def test_product_is_composition(self):
        chain = SupLattice.chain(3)
        q = endo_quantale(chain)
        for f in range(q.size):
            for g in range(q.size):
                composed = tuple(q.maps[g].values[q.maps[f].values[x]] for x in range(chain.size))
                self.assertEqual(q.maps[q.mul(f, g)].values, composed)
        self.assertEqual(q.maps[q.unit].values, (0, 1, 2))

    def test_endo_quantale_is_unital_quantale(self):
        report = verify_axioms(endo_quantale(SupLattice.boolean(2)))
        self.assertTrue(report.is_quantale)
        self.assertTrue(report.unital)
        self.assertTrue(report.strong)
        self.assertFalse(report.locale)

    def test_pointwise_order(self):
        q = endo_quantale(SupLattice.chain(3))
        for f in range(q.size):
            for g in range(q.size):
                expected = all(a <= b for a, b in zip(q.maps[f].values, q.maps[g].values))
                self.assertEqual(bool(q.lattice.leq[f, g]), expected)
        self.assertTrue(np.array_equal(q.lattice.leq.diagonal(), np.ones(q.size, dtype=bool)))
