import json
from unittest import mock

from django.test import SimpleTestCase

from worker.quantale_lab.LabCommon import CapExceeded, UnknownScenario
from worker.quantale_lab.ScenarioRunner import FAIL, PASS, Report, Transcript, list_scenarios, run_all, run_scenario

SCENARIO_NAMES = [
    'c2-diagonal-not-prime',
    'commutative-reflection',
    'coproduct-not-preserved',
    'faithful-sample',
    'kruml-crosscheck',
    'm2-not-spatial',
    'no-natural-spatialization',
    'product-not-preserved',
    'pushout-collapse',
    'spatialization-cn',
    'spmax-m2-nontrivial',
]

# các kịch bản nhẹ, chạy trong vài giây
QUICK = [name for name in SCENARIO_NAMES if name not in ('kruml-crosscheck', 'spatialization-cn')]


class RegistryTests(SimpleTestCase):

    def test_every_scenario_is_listed_with_a_topic(self):
        listed = list_scenarios()
        self.assertEqual([name for name, _ in listed], SCENARIO_NAMES)
        self.assertTrue(all(topic for _, topic in listed))

    def test_unknown_scenario(self):
        with self.assertRaises(UnknownScenario):
            run_scenario('no-such-scenario')


class ScenarioRunTests(SimpleTestCase):

    def test_quick_scenarios_pass(self):
        for name in QUICK:
            with self.subTest(name=name):
                report = run_scenario(name)
                self.assertEqual(report.verdict, PASS, msg=report.to_text())
                self.assertEqual(report.exit_code, 0)

    def test_spatialization_default_and_smaller(self):
        report = run_scenario('spatialization-cn')
        self.assertTrue(report.passed, msg=report.to_text())
        self.assertEqual(report.parameters, {'n': 4, 'samples': 24})

        report = run_scenario('spatialization-cn', {'n': 3, 'samples': 8, 'seed': 5})
        self.assertTrue(report.passed, msg=report.to_text())
        self.assertEqual(report.parameters, {'n': 3, 'samples': 8})
        self.assertEqual(report.seed, 5)
        self.assertIn('2^3', report.to_json())

    def test_kruml_crosscheck_on_small_quantales(self):
        report = run_scenario('kruml-crosscheck', {'max_size': 3, 'carrier_cap': 4})
        self.assertTrue(report.passed, msg=report.to_text())
        checked = [step for step, _, ok in report.transcript if ok is not None]
        self.assertGreater(len(checked), 5)

    def test_reports_are_deterministic(self):
        for name in ('m2-not-spatial', 'faithful-sample'):
            self.assertEqual(run_scenario(name).to_json(), run_scenario(name).to_json())
        first = run_scenario('spatialization-cn', {'n': 2, 'samples': 6, 'seed': 99})
        second = run_scenario('spatialization-cn', {'n': 2, 'samples': 6, 'seed': 99})
        self.assertEqual(first.to_json(), second.to_json())

    def test_run_all_with_overrides(self):
        overrides = {
            'spatialization-cn': {'n': 2, 'samples': 4},
            'kruml-crosscheck': {'max_size': 2, 'carrier_cap': 3},
        }
        reports = run_all(overrides)
        self.assertEqual([r.name for r in reports], SCENARIO_NAMES)
        self.assertTrue(all(r.passed for r in reports), msg=[r.name for r in reports if not r.passed])

    def test_library_error_becomes_failing_step(self):
        def broken(t, seed):
            t.record('bắt đầu', seed)
            raise CapExceeded("quá giới hạn")

        with mock.patch.dict('worker.quantale_lab.ScenarioRunner._REGISTRY', {'broken': broken}):
            report = run_scenario('broken', {'seed': 1})
        self.assertEqual(report.verdict, FAIL)
        self.assertEqual(report.exit_code, 1)
        step, output, ok = report.transcript[-1]
        self.assertEqual(step, 'error')
        self.assertIn('CapExceeded', output)
        self.assertFalse(ok)


class ReportTests(SimpleTestCase):

    def test_transcript_verdict(self):
        t = Transcript()
        t.record('chỉ ghi nhận', 1)
        self.assertFalse(t.passed)
        self.assertTrue(t.expect('đúng', True))
        self.assertTrue(t.passed)
        with self.assertLogs('worker.quantale_lab.ScenarioRunner', level='WARNING'):
            self.assertFalse(t.expect('sai', False, 'giá trị'))
        self.assertFalse(t.passed)
        self.assertEqual(t.steps[-1], ('sai', 'giá trị', False))

    def test_serialisation(self):
        report = Report('demo', 'topic', PASS, [('a', '[1, 2]', True), ('b', 'x', None)], seed=3,
                        parameters={'n': 2})
        data = json.loads(report.to_json())
        self.assertEqual(data['transcript'][0], {'step': 'a', 'output': '[1, 2]', 'ok': True})
        self.assertEqual(data['parameters'], {'n': 2})
        text = report.to_text()
        self.assertTrue(text.startswith('[PASS] demo (topic) seed=3'))
        self.assertIn('ok', text)
