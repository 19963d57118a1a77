import argparse
import json
import logging
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
from django.core.management.base import BaseCommand, CommandError

from laboratory.models import ScenarioRun
from worker.quantale_lab.CorpusLoader import corpus_frames, load_point, load_poset, load_quantale, load_subspace
from worker.quantale_lab.FiniteFrame import (check_generator_commutation, frame_coproduct, is_boolean, is_regular,
                                             verify_coproduct)
from worker.quantale_lab.FiniteQuantale import (is_gelfand, is_spatial_by_primes, primes, right_sided_matches_unit,
                                                sided_elements, spatialize, verify_axioms)
from worker.quantale_lab.LabCommon import QuantaleLabError, UnknownScenario, lab_setting
from worker.quantale_lab.MaxSpectrum import (commutative_reflection, gelfand_identity, is_right_ideal, msjoin,
                                             msmeet, msproduct, msstar, two_sided_closure)
from worker.quantale_lab.Representation import enumerate_points, is_strong
from worker.quantale_lab.ScenarioRunner import Report, list_scenarios, run_all, run_scenario
from worker.quantale_lab.StarAlgebra import Algebra

logger = logging.getLogger(__name__)

FORMATS = ['text', 'json']


def _subcommand(actions, name: str, **kwargs):
    """Subparser cũng nhận --format để có thể đặt sau tên lệnh con."""
    parser = actions.add_parser(name, **kwargs)
    parser.add_argument('--format', choices=FORMATS, default=argparse.SUPPRESS, help="Định dạng đầu ra.")
    return parser


class Command(BaseCommand):
    help = "Phòng thí nghiệm quantale hữu hạn và Max A: kiểm tra tiên đề, điểm, frame, không gian con và kịch bản phản ví dụ."

    def add_arguments(self, parser):
        parser.add_argument('--format', choices=FORMATS, default='text', help="Định dạng đầu ra.")
        actions = parser.add_subparsers(dest='action', required=True)

        check = _subcommand(actions, 'check', help="Kiểm tra tiên đề và phân loại một quantale.")
        check.add_argument('quantale', help="Tên file trong corpus/quantales hoặc đường dẫn JSON.")

        prime = _subcommand(actions, 'primes', help="Liệt kê phần tử nguyên tố và kiểm tra tính spatial.")
        prime.add_argument('quantale')

        points = _subcommand(actions, 'points', help="Liệt kê các điểm (biểu diễn bất khả quy).")
        points.add_argument('quantale')
        points.add_argument('--carrier-cap', type=int, default=None)
        points.add_argument('--include-zero', action='store_true')

        spat = _subcommand(actions, 'spatialize', help="Thương của quantale theo một họ điểm.")
        spat.add_argument('quantale')
        spat.add_argument('--points', nargs='+', default=None,
                          help="File điểm (corpus/points hoặc đường dẫn JSON); bỏ trống thì dùng mọi điểm liệt kê được.")
        spat.add_argument('--carrier-cap', type=int, default=None)

        frame = _subcommand(actions, 'frame', help="Phép toán trên frame hữu hạn.")
        frame_actions = frame.add_subparsers(dest='frame_action', required=True)
        coproduct = _subcommand(frame_actions, 'coproduct')
        coproduct.add_argument('left', help="Poset trong corpus/posets.")
        coproduct.add_argument('right')
        coproduct.add_argument('--verify', action='store_true', help="Kiểm tra tính phổ dụng với các frame corpus.")
        regular = _subcommand(frame_actions, 'regular')
        regular.add_argument('poset')

        max_parser = _subcommand(actions, 'max', help="Phép toán trên Max A.")
        max_parser.add_argument('algebra', help="Ví dụ: blocks=[2,1]")
        max_actions = max_parser.add_subparsers(dest='max_action', required=True)
        for name in ('product', 'join', 'meet'):
            binary = _subcommand(max_actions, name)
            binary.add_argument('left', help="Không gian con trong corpus/subspaces.")
            binary.add_argument('right')
        for name in ('closure', 'gelfand', 'star'):
            unary = _subcommand(max_actions, name)
            unary.add_argument('subspace')
        _subcommand(max_actions, 'reflect')

        cex = _subcommand(actions, 'cex', help="Chạy kịch bản phản ví dụ.")
        cex.add_argument('name', nargs='?')
        cex.add_argument('--all', action='store_true')
        cex.add_argument('--list', action='store_true')
        cex.add_argument('--save', action='store_true', help="Lưu báo cáo vào ScenarioRun.")
        cex.add_argument('--n', type=int, default=None)
        cex.add_argument('--samples', type=int, default=None)
        cex.add_argument('--seed', type=int, default=None)

    def handle(self, *args, **options):
        self.format = options['format']
        handler = getattr(self, f"_{options['action']}")
        try:
            handler(options)
        except UnknownScenario as e:
            raise CommandError(str(e), returncode=2)
        except (QuantaleLabError, ValueError) as e:
            logger.error(f"qlab {options['action']} thất bại: {e}")
            raise CommandError(str(e), returncode=1)

    def _emit(self, payload: Dict[str, Any], rows: Optional[List[Dict[str, Any]]] = None):
        if self.format == 'json':
            if rows is not None:
                payload = dict(payload, rows=rows)
            self.stdout.write(json.dumps(payload, ensure_ascii=False, indent=2, default=str))
            return
        for key, value in payload.items():
            self.stdout.write(f"{key}: {value}")
        if rows:
            self.stdout.write(pd.DataFrame(rows).to_string(index=False))

    @staticmethod
    def _named(q, elements: Sequence[int]) -> List[str]:
        return [q.names[a] for a in elements]

    def _check(self, options):
        q = load_quantale(options['quantale'])
        report = verify_axioms(q)
        payload = {'quantale': q.name, 'size': q.size}
        payload.update(report.as_dict())
        if report.is_quantale:
            for side in ('right', 'left', 'two'):
                payload[f"{side}_sided"] = self._named(q, sided_elements(q, side))
            if q.unit is not None:
                matches = right_sided_matches_unit(q)
                payload['right_sided_is_q_unit'] = matches.holds
                if not matches.holds:
                    payload['right_sided_witness'] = q.names[matches.witness]
        if report.gelfand is False:
            payload['gelfand_witness'] = q.names[is_gelfand(q).witness]
        self._emit(payload)
        if not report.is_quantale:
            raise CommandError(f"'{q.name}' không phải quantale: {report.violation}", returncode=1)

    def _primes(self, options):
        q = load_quantale(options['quantale'])
        spatial = is_spatial_by_primes(q)
        payload = {
            'quantale': q.name,
            'primes': self._named(q, primes(q)),
            'spatial': spatial.holds,
        }
        if not spatial.holds:
            payload['witness'] = q.names[spatial.witness]
        self._emit(payload)

    def _points(self, options):
        q = load_quantale(options['quantale'])
        found = enumerate_points(q, options['carrier_cap'], include_zero=options['include_zero'])
        rows = []
        for r in found:
            row = r.describe()
            row['strong'] = is_strong(r)
            rows.append(row)
        self._emit({'quantale': q.name, 'points': len(found)}, rows)

    def _spatialize(self, options):
        q = load_quantale(options['quantale'])
        if options['points']:
            found = [load_point(source, q) for source in options['points']]
        else:
            found = enumerate_points(q, options['carrier_cap'])
        quotient, projection = spatialize(q, found)
        rows = [{'element': q.names[a], 'class': quotient.names[projection(a)]} for a in range(q.size)]
        self._emit({
            'quantale': q.name,
            'points': len(found),
            'point_family': 'explicit' if options['points'] else 'enumerated',
            'classes': quotient.size,
            'quotient_is_quantale': verify_axioms(quotient).is_quantale,
        }, rows)

    def _frame(self, options):
        if options['frame_action'] == 'regular':
            frame = load_poset(options['poset'])
            regular, boolean = is_regular(frame), is_boolean(frame)
            payload = {'frame': frame.name, 'size': frame.size, 'regular': regular.holds, 'boolean': boolean.holds}
            if not regular.holds:
                payload['witness'] = frame.element_name(regular.witness)
            self._emit(payload)
            return

        left, right = load_poset(options['left']), load_poset(options['right'])
        coproduct = frame_coproduct(left, right)
        payload = {
            'frame': coproduct.frame.name,
            'size': coproduct.frame.size,
            'points': list(coproduct.frame.points),
            'generators_commute': check_generator_commutation(left, right, coproduct),
        }
        if options['verify']:
            cap = lab_setting('QLAB_COPRODUCT_TEST_FRAME_CAP')
            tests = [f for f in corpus_frames() if f.size <= cap]
            universal = verify_coproduct(left, right, coproduct, tests)
            payload['universal_property'] = universal.holds
            payload['test_frames'] = [f.name for f in tests]
            if not universal.holds:
                payload['witness'] = universal.witness
        self._emit(payload)

    def _max(self, options):
        algebra = Algebra.parse(options['algebra'])
        action = options['max_action']
        if action == 'reflect':
            reflection = commutative_reflection(algebra)
            self._emit({
                'algebra': str(algebra),
                'commutative_quotient': reflection.algebra.label,
                'ideal_frame_size': reflection.frame.size,
                'commutator_ideal': str(reflection.commutator_ideal),
            })
            return

        if action in ('product', 'join', 'meet'):
            m = load_subspace(options['left'], algebra)
            n = load_subspace(options['right'], algebra)
            result = {'product': msproduct, 'join': msjoin, 'meet': msmeet}[action](m, n)
            self._emit({'operation': action, 'rank': result.rank, 'result': str(result),
                        'basis': result.canonical()})
            return

        m = load_subspace(options['subspace'], algebra)
        if action == 'gelfand':
            self._emit({'subspace': str(m), 'right_ideal': is_right_ideal(m), 'gelfand': gelfand_identity(m)})
            return
        result = two_sided_closure(m) if action == 'closure' else msstar(m)
        self._emit({'operation': action, 'rank': result.rank, 'result': str(result), 'basis': result.canonical()})

    def _cex(self, options):
        if options['list']:
            self._emit({'scenarios': len(list_scenarios())},
                       [{'name': name, 'topic': topic} for name, topic in list_scenarios()])
            return

        overrides = {'n': options['n'], 'samples': options['samples'], 'seed': options['seed']}
        if options['all']:
            reports = run_all({name: self._overrides_for(name, overrides) for name, _ in list_scenarios()})
        elif options['name']:
            reports = [run_scenario(options['name'], self._overrides_for(options['name'], overrides))]
        else:
            raise CommandError("Cần tên kịch bản hoặc --all.", returncode=2)

        for report in reports:
            if options['save']:
                ScenarioRun.from_report(report)
        self._write_reports(reports)

        failed = [r.name for r in reports if not r.passed]
        if failed:
            raise CommandError(f"Kịch bản không đạt: {', '.join(failed)}", returncode=1)

    @staticmethod
    def _overrides_for(name: str, overrides: Dict[str, Any]) -> Dict[str, Any]:
        if name == 'spatialization-cn':
            return overrides
        return {'seed': overrides['seed']}

    def _write_reports(self, reports: List[Report]):
        if self.format == 'json':
            data = [r.as_dict() for r in reports]
            self.stdout.write(json.dumps(data[0] if len(data) == 1 else data, ensure_ascii=False, indent=2))
            return
        for report in reports:
            self.stdout.write(report.to_text())
            self.stdout.write('')
