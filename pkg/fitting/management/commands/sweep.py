from django.conf import settings

from fitting.forms import SweepForm
from fitting.management.base import RigCommand, add_correlation_argument, add_sequence_arguments
from fitting.ordering import OrderingKind
from fitting.pipeline import TABLE_COLUMNS, sweep, write_rows
from fitting.solvers import Method


def joined(values):
    return ','.join(str(v) for v in values)


class Command(RigCommand):
    help = 'Sweep every method over the alpha and pass grids and tabulate the trade-off.'
    form_class = SweepForm

    def add_arguments(self, parser):
        super().add_arguments(parser)
        add_sequence_arguments(parser, reference=True)
        parser.add_argument('--methods', default=joined(m.value for m in Method))
        parser.add_argument('--alpha-grid', default=joined(settings.RIGFIT['ALPHA_GRID']))
        parser.add_argument('--passes-grid', default=joined(settings.RIGFIT['PASSES_GRID']))
        parser.add_argument('--ordering', default=OrderingKind.DECREASING_MAGNITUDE.value,
                            choices=[k.value for k in OrderingKind])
        add_correlation_argument(parser)

    def run(self, data, out):
        rig, targets, clean = self.load_inputs(data)
        rows = sweep(
            rig, targets.frames, clean,
            methods=data['methods'],
            alpha_grid=data['alpha_grid'],
            passes_grid=data['passes_grid'],
            ordering=data['strategy'],
            threads=data['threads'],
            seed=data['seed'],
            omit_timing=data['omit_timing'],
            **self.solver_options(),
        )
        path = out / 'sweep.csv'
        with open(path, 'w', newline='') as stream:
            write_rows(stream, TABLE_COLUMNS, rows)
        return [path], {'ordering': data['seed']}
