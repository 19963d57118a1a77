import json
import os
import tempfile
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from laboratory.models import ScenarioRun


def qlab(*args):
    out = StringIO()
    call_command('qlab', *args, stdout=out)
    return out.getvalue()


def qlab_json(*args):
    return json.loads(qlab('--format', 'json', *args))


class QuantaleCommandTests(TestCase):

    def test_check(self):
        data = qlab_json('check', 'chain3-nilpotent.json')
        self.assertTrue(data['is_quantale'])
        self.assertFalse(data['gelfand'])
        self.assertEqual(data['gelfand_witness'], 'a')
        self.assertEqual(data['right_sided'], ['0', 'a', '1'])

    def test_check_reports_right_sided_mismatch(self):
        data = qlab_json('check', 'chain3-bad-unit.json')
        self.assertFalse(data['right_sided_is_q_unit'])
        self.assertEqual(data['right_sided_witness'], 'a')
        self.assertTrue(qlab_json('check', 'chain3-nilpotent.json')['right_sided_is_q_unit'])

    def test_check_rejects_non_quantale(self):
        handle, path = tempfile.mkstemp(suffix='.json')
        self.addCleanup(os.remove, path)
        with os.fdopen(handle, 'w', encoding='utf-8') as f:
            json.dump({'name': 'broken', 'lattice': 'chain3.json',
                       'product': [[0, 0, 0], [0, 1, 1], [0, 1, 0]]}, f)
        with self.assertRaises(CommandError) as ctx:
            qlab('check', path)
        self.assertEqual(ctx.exception.returncode, 1)

    def test_missing_file(self):
        with self.assertRaises(CommandError) as ctx:
            qlab('check', 'does-not-exist.json')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_primes(self):
        data = qlab_json('primes', 'chain3-nilpotent.json')
        self.assertEqual(data['primes'], ['a'])
        self.assertFalse(data['spatial'])
        self.assertEqual(data['witness'], '0')
        self.assertIn('primes: [', qlab('primes', 'boolean4-locale.json'))

    def test_points_and_spatialize(self):
        data = qlab_json('points', 'chain2-locale.json', '--carrier-cap', '2')
        self.assertEqual(data['points'], 1)
        self.assertTrue(data['rows'][0]['strong'])
        data = qlab_json('points', 'chain2-locale.json', '--carrier-cap', '2', '--include-zero')
        self.assertEqual(data['points'], 3)

        data = qlab_json('spatialize', 'chain3-nilpotent.json', '--carrier-cap', '3')
        self.assertEqual(data['classes'], 2)
        self.assertTrue(data['quotient_is_quantale'])
        self.assertEqual(data['point_family'], 'enumerated')

    def test_spatialize_with_explicit_points(self):
        data = qlab_json('spatialize', 'chain3-nilpotent.json', '--points', 'nilpotent-collapse.json')
        self.assertEqual(data['point_family'], 'explicit')
        self.assertEqual(data['points'], 1)
        self.assertEqual(data['classes'], 2)
        self.assertEqual([row['class'] for row in data['rows']], ['0', '0', '1'])

        with self.assertRaises(CommandError) as ctx:
            qlab('spatialize', 'chain3-nilpotent.json', '--points', 'nilpotent-not-hom.json')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_format_after_subcommand(self):
        data = json.loads(qlab('primes', 'chain3-nilpotent.json', '--format', 'json'))
        self.assertEqual(data['primes'], ['a'])
        self.assertIn('primes: [', qlab('primes', 'chain3-nilpotent.json'))


class FrameCommandTests(TestCase):

    def test_coproduct_verify(self):
        data = qlab_json('frame', 'coproduct', 'point.json', 'point.json', '--verify')
        self.assertEqual(data['size'], 2)
        self.assertTrue(data['universal_property'])
        self.assertTrue(data['generators_commute'])

    def test_regular(self):
        data = qlab_json('frame', 'regular', 'chain3.json')
        self.assertFalse(data['regular'])
        self.assertFalse(data['boolean'])
        self.assertEqual(qlab_json('frame', 'regular', 'antichain2.json')['regular'], True)


class MaxCommandTests(TestCase):

    def test_product(self):
        data = qlab_json('max', 'blocks=[2]', 'product', 'm2-top-row.json', 'm2-left-column.json')
        self.assertEqual(data['rank'], 1)
        self.assertEqual(data['basis'], [['1', '0', '0', '0']])

    def test_meet_and_closure(self):
        self.assertEqual(qlab_json('max', 'blocks=[2]', 'meet', 'm2-symmetric.json', 'm2-top-row.json')['rank'], 1)
        self.assertEqual(qlab_json('max', 'blocks=[2]', 'closure', 'm2-top-row.json')['rank'], 4)

    def test_gelfand_requires_right_ideal(self):
        self.assertTrue(qlab_json('max', 'blocks=[2]', 'gelfand', 'm2-top-row.json')['gelfand'])
        with self.assertRaises(CommandError) as ctx:
            qlab('max', 'blocks=[2]', 'gelfand', 'm2-left-column.json')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_reflect_and_bad_algebra(self):
        self.assertEqual(qlab_json('max', 'blocks=[2,1]', 'reflect')['ideal_frame_size'], 2)
        with self.assertRaises(CommandError):
            qlab('max', 'M2', 'reflect')


class ScenarioCommandTests(TestCase):

    def test_single_scenario_json(self):
        data = qlab_json('cex', 'm2-not-spatial')
        self.assertEqual(data['name'], 'm2-not-spatial')
        self.assertEqual(data['verdict'], 'pass')
        self.assertEqual(ScenarioRun.objects.count(), 0)

    def test_save(self):
        qlab('cex', 'product-not-preserved', '--save')
        run = ScenarioRun.objects.get()
        self.assertEqual(run.verdict, 'pass')
        self.assertEqual(run.transcript[-1]['ok'], True)

    def test_spatialization_overrides(self):
        data = qlab_json('cex', 'spatialization-cn', '--n', '2', '--samples', '4', '--seed', '3')
        self.assertEqual(data['parameters'], {'n': 2, 'samples': 4})
        self.assertEqual(data['seed'], 3)

    def test_list(self):
        data = qlab_json('cex', '--list')
        self.assertEqual(data['scenarios'], 11)
        self.assertIn('m2-not-spatial', [row['name'] for row in data['rows']])

    def test_exit_codes(self):
        with self.assertRaises(CommandError) as ctx:
            qlab('cex', 'no-such-scenario')
        self.assertEqual(ctx.exception.returncode, 2)
        with self.assertRaises(CommandError) as ctx:
            qlab('cex')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_format_after_scenario_name(self):
        data = json.loads(qlab('cex', 'm2-not-spatial', '--format', 'json'))
        self.assertEqual(data['verdict'], 'pass')

    def test_text_output(self):
        out = qlab('cex', 'c2-diagonal-not-prime')
        self.assertTrue(out.startswith('[PASS] c2-diagonal-not-prime'))
