from django.conf import settings

from fitting.dataio import WEIGHTS, Animation, save_animation
from fitting.forms import FitForm
from fitting.management.base import RigCommand, add_correlation_argument, add_sequence_arguments, write_json
from fitting.ordering import OrderingKind
from fitting.pipeline import fit_sequence, solver_config
from fitting.serializers import FitReportSerializer
from fitting.solvers import Method


class Command(RigCommand):
    help = 'Fit every frame of a target sequence with one solver.'
    form_class = FitForm

    def add_arguments(self, parser):
        super().add_arguments(parser)
        add_sequence_arguments(parser)
        parser.add_argument('--method', default=Method.CD_QUARTIC.value, choices=[m.value for m in Method])
        parser.add_argument('--alpha', type=float, default=settings.RIGFIT['COMPARISON_ALPHA'])
        parser.add_argument('--passes', type=int, default=1)
        parser.add_argument('--ordering', default=OrderingKind.DECREASING_MAGNITUDE.value,
                            choices=[k.value for k in OrderingKind])
        add_correlation_argument(parser)
        parser.add_argument('--seol-clip', action='store_true', help='clip Seol weights at 1 inside the loop')
        parser.add_argument('--check-descent', action='store_true', default=settings.RIGFIT_CHECK_DESCENT,
                            help='assert that every coordinate update decreases the objective')

    def run(self, data, out):
        rig, targets, _ = self.load_inputs(data)
        config = solver_config(
            data['method'], data['alpha'], data['passes'], data['strategy'],
            seol_clip_in_loop=data['seol_clip'], check_descent=data['check_descent'], **self.solver_options())
        result = fit_sequence(rig, targets.frames, config, data['threads'], data['seed'])

        weights_path = save_animation(Animation(kind=WEIGHTS, frames=result.weights, seed=data['seed']),
                                      out / 'fitted.txt')
        report = FitReportSerializer({
            'method': config.method.value,
            'passes': config.passes,
            'alpha': config.alpha,
            'ordering': config.ordering.kind.value if config.method.sequential else '',
            'frames': [
                {
                    'frame_id': t,
                    'method': r.method.value,
                    'objective_trace': r.objective_trace,
                    'coordinate_visits': r.coordinate_visits,
                    'degenerate_visits': r.degenerate_visits,
                    'wall_time': 0.0 if data['omit_timing'] else r.wall_time,
                    'pre_clip_cardinality': r.pre_clip_cardinality,
                }
                for t, r in enumerate(result.reports)
            ],
        }).data
        reports_path = write_json(out / 'reports.json', report)
        return [weights_path, reports_path], {'ordering': data['seed']}
