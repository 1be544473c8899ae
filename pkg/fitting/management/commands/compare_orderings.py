from django.conf import settings

from fitting.forms import CompareOrderingsForm
from fitting.management.base import RigCommand, add_correlation_argument, add_sequence_arguments
from fitting.management.commands.sweep import joined
from fitting.ordering import OrderingKind
from fitting.pipeline import TABLE_COLUMNS, compare_orderings, write_rows
from fitting.solvers import Method


class Command(RigCommand):
    help = 'Fit one sequence under every coordinate ordering at a fixed alpha.'
    form_class = CompareOrderingsForm

    def add_arguments(self, parser):
        super().add_arguments(parser)
        add_sequence_arguments(parser, reference=True)
        parser.add_argument('--method', default=Method.CD_QUARTIC.value,
                            choices=[Method.CD_QUARTIC.value, Method.CD_LINEAR.value])
        parser.add_argument('--alpha', type=float, default=settings.RIGFIT['COMPARISON_ALPHA'])
        parser.add_argument('--passes', type=int, default=1)
        parser.add_argument('--orderings', default=joined(k.value for k in OrderingKind))
        add_correlation_argument(parser)

    def run(self, data, out):
        rig, targets, clean = self.load_inputs(data)
        rows = compare_orderings(
            rig, targets.frames, clean,
            alpha=data['alpha'],
            passes=data['passes'],
            method=data['method'],
            kinds=data['orderings'],
            normalized=data['normalized_correlation'],
            threads=data['threads'],
            seed=data['seed'],
            omit_timing=data['omit_timing'],
            **self.solver_options(),
        )
        path = out / 'orderings.csv'
        with open(path, 'w', newline='') as stream:
            write_rows(stream, TABLE_COLUMNS, rows)
        return [path], {'ordering': data['seed']}
