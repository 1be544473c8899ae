import json
from pathlib import Path

from fitting.dataio import MESH, WEIGHTS, load_animation, load_rig
from fitting.exceptions import RigFileError
from fitting.forms import EvalForm
from fitting.management.base import RigCommand, write_json
from fitting.metrics import evaluate_sequence
from fitting.serializers import FitReportSerializer, MetricSummarySerializer


def read_reports(path):
    """Validated payload of a reports.json written by ``fit``."""
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise RigFileError(f'cannot read fit reports {path}: {exc}') from exc
    serializer = FitReportSerializer(data=payload)
    if not serializer.is_valid():
        raise RigFileError(f'malformed fit reports {path}: {serializer.errors}')
    return serializer.validated_data


class Command(RigCommand):
    help = 'Score fitted weights against the clean reference meshes.'
    form_class = EvalForm

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--rig', required=True)
        parser.add_argument('--weights', required=True, help='fitted weight animation')
        parser.add_argument('--clean', dest='reference', required=True)
        parser.add_argument('--reports', help='reports.json of the fit, for solve times and method labels')
        parser.add_argument('--omit-timing', action='store_true')

    def run(self, data, out):
        rig = load_rig(data['rig'])
        weights = load_animation(data['weights'], kind=WEIGHTS).check_against(rig)
        clean = load_animation(data['reference'], kind=MESH).require_clean().check_against(rig)

        described = {'method': None, 'passes': None, 'alpha': None, 'ordering': None}
        times = None
        if data['reports']:
            reports = read_reports(data['reports'])
            described = {name: reports[name] for name in described}
            frames = sorted(reports['frames'], key=lambda frame: frame['frame_id'])
            if len(frames) != weights.frame_count:
                raise RigFileError(f'{len(frames)} reports for {weights.frame_count} fitted frames')
            if not data['omit_timing']:
                times = [frame['wall_time'] for frame in frames]

        table = evaluate_sequence(rig, weights.frames, clean.frames, times)
        metrics_path = out / 'metrics.csv'
        with open(metrics_path, 'w', newline='') as stream:
            table.write_csv(stream)
        summary = MetricSummarySerializer({
            **described,
            'frame_count': weights.frame_count,
            'roughness_aggregate': table.roughness_aggregate,
            **table.aggregates(),
        }).data
        summary_path = write_json(out / 'summary.json', summary)
        return [metrics_path, summary_path], {}
