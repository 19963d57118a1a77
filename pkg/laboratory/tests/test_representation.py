from django.test import SimpleTestCase, override_settings

from worker.quantale_lab.CorpusLoader import load_quantale
from worker.quantale_lab.FiniteQuantale import check_hom, spatialize, verify_axioms
from worker.quantale_lab.LabCommon import CapExceeded, InvalidHomomorphism, MissingStructure
from worker.quantale_lab.Representation import (Representation, action_laws, enumerate_points,
                                                enumerate_representations, is_irreducible, is_pre_unital,
                                                is_strong, kruml_crosscheck, separates)
from worker.quantale_lab.SupLattice import SupLattice, endo_quantale

SMALL = ('chain2-locale.json', 'chain3-locale.json', 'chain3-nilpotent.json', 'chain2-zero-product.json',
         'endo-chain2.json')


class RepresentationTests(SimpleTestCase):

    def test_every_enumerated_representation_is_a_module(self):
        for name in SMALL:
            q = load_quantale(name)
            for r in enumerate_representations(q, carrier_cap=4):
                with self.subTest(name=name, rep=r.hom.map):
                    self.assertTrue(check_hom(r.hom).holds)
                    self.assertTrue(action_laws(r))

    def test_strong_implies_irreducible(self):
        for name in SMALL:
            for r in enumerate_representations(load_quantale(name), carrier_cap=4):
                if is_strong(r):
                    self.assertTrue(is_irreducible(r), msg=f"{name}: {r}")

    def test_pre_unital_irreducible_is_strong(self):
        for name in ('chain2-locale.json', 'chain3-locale.json', 'chain3-nilpotent.json', 'endo-chain2.json'):
            for r in enumerate_representations(load_quantale(name), carrier_cap=4):
                if is_pre_unital(r):
                    self.assertEqual(is_irreducible(r), is_strong(r), msg=f"{name}: {r}")

    def test_pre_unital_needs_unit(self):
        q = load_quantale('chain2-zero-product.json')
        r = enumerate_representations(q, carrier_cap=1)[0]
        with self.assertRaises(MissingStructure):
            is_pre_unital(r)

    def test_points_of_two_element_locale(self):
        q = load_quantale('chain2-locale.json')
        points = enumerate_points(q, carrier_cap=2)
        self.assertEqual(len(points), 1)
        self.assertEqual(points[0].carrier.size, 2)
        self.assertEqual(points[0].describe()['images'], [[0, 0], [0, 1]])
        self.assertEqual(len(enumerate_points(q, carrier_cap=2, include_zero=True)), 3)

    def test_enumeration_is_deterministic(self):
        q = load_quantale('chain3-locale.json')
        first = [(r.carrier.size, r.hom.map) for r in enumerate_representations(q, carrier_cap=3)]
        second = [(r.carrier.size, r.hom.map) for r in enumerate_representations(q, carrier_cap=3)]
        self.assertEqual(first, second)

    def test_invalid_representation_rejected(self):
        q = load_quantale('chain2-locale.json')
        target = endo_quantale(SupLattice.chain(2))
        # 0 phải đi tới ánh xạ 0
        with self.assertRaises(InvalidHomomorphism):
            Representation(q, target, (1, 1))

    def test_action(self):
        q = load_quantale('chain3-locale.json')
        target = endo_quantale(SupLattice.chain(2))
        r = Representation(q, target, (0, 1, 1))
        self.assertEqual(r.act(1, 1), 1)
        self.assertEqual(r.act(1, 0), 0)
        self.assertTrue(is_strong(r))
        self.assertTrue(is_irreducible(r))


class CapTests(SimpleTestCase):

    @override_settings(QLAB_CARRIER_CAP=3)
    def test_carrier_cap_above_configuration(self):
        with self.assertRaises(CapExceeded):
            enumerate_points(load_quantale('chain2-locale.json'), carrier_cap=4)

    @override_settings(QLAB_POINT_SOURCE_CAP=4)
    def test_source_cap(self):
        with self.assertRaises(CapExceeded):
            enumerate_points(load_quantale('endo-chain3.json'), carrier_cap=2)


class SpatialityTests(SimpleTestCase):

    def test_points_separate_spatial_locales(self):
        for name in ('chain3-locale.json', 'boolean4-locale.json'):
            q = load_quantale(name)
            self.assertTrue(separates(q, enumerate_points(q, carrier_cap=2)))

    def test_points_do_not_separate_nilpotent_chain(self):
        q = load_quantale('chain3-nilpotent.json')
        points = enumerate_points(q, carrier_cap=4)
        found = separates(q, points)
        self.assertFalse(found)
        self.assertIn(0, found.witness)
        quotient, _ = spatialize(q, points)
        self.assertLess(quotient.size, q.size)
        self.assertTrue(verify_axioms(quotient).is_quantale)

    def test_kruml_agreement(self):
        for name in ('chain3-locale.json', 'boolean4-locale.json', 'chain3-nilpotent.json',
                     'chain2-zero-product.json', 'm3-zero-product.json'):
            with self.subTest(name=name):
                record = kruml_crosscheck(load_quantale(name), carrier_cap=4)
                self.assertTrue(record.agree)
