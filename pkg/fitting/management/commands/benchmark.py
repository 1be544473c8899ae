from fitting.dataio import WEIGHTS, load_animation
from fitting.forms import BenchmarkForm
from fitting.management.base import RigCommand, add_sequence_arguments
from fitting.pipeline import TABLE_COLUMNS, benchmark, write_rows
from fitting.synthetic import SELECTED_ALPHA


class Command(RigCommand):
    help = 'Run every method at its selected alpha on one character and add the ground-truth line.'
    form_class = BenchmarkForm

    def add_arguments(self, parser):
        super().add_arguments(parser)
        add_sequence_arguments(parser, reference=True)
        parser.add_argument('--weights', required=True, help='ground-truth weight animation')
        parser.add_argument('--character', default='ada', choices=sorted(SELECTED_ALPHA),
                            help='selects the per-method alpha')
        parser.add_argument('--passes', type=int, default=5)

    def run(self, data, out):
        rig, targets, clean = self.load_inputs(data)
        truth = load_animation(data['weights'], kind=WEIGHTS).check_against(rig)
        rows = benchmark(
            rig, targets.frames, clean, truth.frames,
            character=data['character'],
            passes=data['passes'],
            threads=data['threads'],
            seed=data['seed'],
            omit_timing=data['omit_timing'],
            **self.solver_options(),
        )
        path = out / 'benchmark.csv'
        with open(path, 'w', newline='') as stream:
            write_rows(stream, TABLE_COLUMNS, rows)
        return [path], {}
