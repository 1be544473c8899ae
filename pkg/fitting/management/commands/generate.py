from django.conf import settings

from fitting.dataio import save_animation, save_rig
from fitting.forms import GenerateForm
from fitting.management.base import RigCommand
from fitting.synthetic import CHARACTER_PRESETS, generate_rig, generate_sequence, noisy_sequence


class Command(RigCommand):
    help = 'Generate a synthetic rig with ground-truth weights, clean meshes and noisy targets.'
    form_class = GenerateForm

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--character', default='ada', choices=sorted(CHARACTER_PRESETS),
                            help='dimension preset (default: ada)')
        parser.add_argument('--blendshapes', type=int, help='override m')
        parser.add_argument('--vertices', type=int, help='override n')
        parser.add_argument('--pairs', type=int)
        parser.add_argument('--triplets', type=int)
        parser.add_argument('--quads', type=int)
        parser.add_argument('--no-corrections', action='store_true', help='linear-only rig')
        parser.add_argument('--orthogonal', action='store_true',
                            help='orthonormal blendshapes of one common norm (well-conditioned rig)')
        parser.add_argument('--frames', type=int, help='frame count (default: the preset)')
        parser.add_argument('--sparsity', type=int, default=60, help='active weights per frame')
        parser.add_argument('--sigma2', type=float, default=settings.RIGFIT['SIGMA2'],
                            help='variance of the Gaussian noise added to the targets')
        parser.add_argument('--correction-scale', type=float, default=settings.RIGFIT['CORRECTION_SCALE'])
        parser.add_argument('--binary', action='store_true', help='write .npz instead of text')

    def run(self, data, out):
        spec = data['spec']
        frames = data['frames']
        if frames is None:
            frames = CHARACTER_PRESETS[data['character']]['frames']
        suffix = '.npz' if data['binary'] else '.txt'
        seeds = {'rig': spec.seed, 'sequence': spec.seed + 1, 'noise': spec.seed + 2}

        rig = generate_rig(spec)
        truth, clean = generate_sequence(rig, frames, spec.sparsity, seeds['sequence'])
        noisy = noisy_sequence(clean, data['sigma2'], seeds['noise'])
        files = [
            save_rig(rig, out / f'rig{suffix}'),
            save_animation(truth, out / f'weights{suffix}'),
            save_animation(clean, out / f'clean{suffix}'),
            save_animation(noisy, out / f'noisy{suffix}'),
        ]
        return files, seeds
