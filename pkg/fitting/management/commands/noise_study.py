from django.conf import settings

from fitting.dataio import MESH, load_animation, load_rig
from fitting.forms import NoiseStudyForm
from fitting.management.base import RigCommand
from fitting.management.commands.sweep import joined
from fitting.pipeline import NOISE_COLUMNS, NOISE_STUDY_ALPHAS, noise_study, write_rows


class Command(RigCommand):
    help = 'Add increasing Gaussian noise to clean meshes and record per-frame error and cardinality.'
    form_class = NoiseStudyForm

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--rig', required=True)
        parser.add_argument('--clean', dest='reference', required=True)
        parser.add_argument('--frames', type=int, default=100, help='leading frames to use')
        parser.add_argument('--sigma2-grid', default=joined(settings.RIGFIT['SIGMA2_GRID']))
        parser.add_argument('--alpha-grid', default=joined(NOISE_STUDY_ALPHAS))
        parser.add_argument('--passes', type=int, default=5)
        parser.add_argument('--threads', type=int, default=settings.RIGFIT_THREADS)

    def run(self, data, out):
        rig = load_rig(data['rig'])
        clean = load_animation(data['reference'], kind=MESH)
        rows = noise_study(
            rig, clean,
            sigma2_grid=data['sigma2_grid'],
            frames=data['frames'],
            alphas=data['alpha_grid'],
            passes=data['passes'],
            seed=data['seed'],
            threads=data['threads'],
            **self.solver_options(),
        )
        path = out / 'noise_study.csv'
        with open(path, 'w', newline='') as stream:
            write_rows(stream, NOISE_COLUMNS, rows)
        return [path], {'noise': data['seed']}
