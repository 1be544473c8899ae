import json
import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from django.db import DatabaseError

from fitting.dataio import FORMAT_VERSION, MESH, load_animation, load_rig
from fitting.exceptions import ContractError, RigFileError
from fitting.models import RunRecord
from fitting.serializers import ManifestSerializer

logger = logging.getLogger(__name__)

CONFIG_ERROR = 2
DATA_ERROR = 3


def write_json(path, payload):
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + '\n')
    return path


def plain(value):
    """JSON-friendly copy of a raw option value."""
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    return value


class RigCommand(BaseCommand):
    """Validates options with ``form_class``, runs, then writes a manifest and records the run.

    Subclasses implement ``run(data, out)`` returning ``(files, seeds)``.
    Invalid options exit with code 2, unusable input data with code 3.
    """

    form_class = None

    def add_arguments(self, parser):
        parser.add_argument('--out', default=None,
                            help='output directory (default: RIGFIT_OUTPUT_DIR)')
        parser.add_argument('--seed', type=int, default=0)

    def handle(self, *args, **options):
        if options.get('out') is None:
            options['out'] = str(settings.RIGFIT_OUTPUT_DIR)
        raw = {name: options.get(name) for name in self.form_class.base_fields}
        form = self.form_class(data=raw)
        if not form.is_valid():
            raise CommandError(f'invalid configuration:\n{form.errors.as_text()}', returncode=CONFIG_ERROR)
        data = form.cleaned_data
        out = Path(data['out'])
        out.mkdir(parents=True, exist_ok=True)
        try:
            files, seeds = self.run(data, out)
        except (ContractError, RigFileError) as exc:
            raise CommandError(str(exc), returncode=DATA_ERROR) from exc

        config = {name: plain(value) for name, value in raw.items()}
        manifest = ManifestSerializer({
            'command': self.command_name,
            'format_version': FORMAT_VERSION,
            'config': config,
            'seeds': seeds,
            'files': sorted(Path(f).name for f in files),
        }).data
        manifest_path = write_json(out / 'manifest.json', manifest)
        self.record(config, data.get('seed'), out, manifest_path)
        self.stdout.write(self.style.SUCCESS(f'{self.command_name}: wrote {len(files)} files to {out}'))

    @property
    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]

    def run(self, data, out):
        raise NotImplementedError

    def record(self, config, seed, out, manifest_path):
        try:
            RunRecord.objects.create(
                command=self.command_name,
                seed=seed,
                config=config,
                output_dir=str(out),
                manifest_path=str(manifest_path),
            )
        except DatabaseError as exc:
            logger.warning('run not recorded in the registry (%s); run "manage.py migrate"', exc)

    def load_inputs(self, data):
        """The rig, the targets to fit and, when given, the clean reference sequence."""
        rig = load_rig(data['rig'])
        targets = load_animation(data['frames'], kind=MESH).check_against(rig)
        clean = None
        if data.get('reference'):
            clean = load_animation(data['reference'], kind=MESH).require_clean().check_against(rig)
        return rig, targets, clean

    def solver_options(self):
        return {
            'degenerate_norm': settings.RIGFIT['DEGENERATE_NORM'],
            'pinv_cutoff': settings.RIGFIT['PINV_CUTOFF'],
        }


def add_sequence_arguments(parser, reference=False):
    parser.add_argument('--rig', required=True)
    parser.add_argument('--frames', required=True, help='target (noisy) mesh animation')
    if reference:
        parser.add_argument('--clean', dest='reference', required=True,
                            help='clean mesh animation the reconstructions are scored against')
    parser.add_argument('--threads', type=int, default=settings.RIGFIT_THREADS)
    parser.add_argument('--omit-timing', action='store_true',
                        help='write 0 for solve times so repeated runs are byte-identical')


def add_correlation_argument(parser):
    parser.add_argument('--normalized-correlation', action='store_true',
                        help='rank the correlation orderings by cosine similarity instead of the raw inner product')
