"""Reconstruction, sparsity and smoothness metrics for fitted sequences."""
import csv
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import ContractError
from .rig import Mesh, evaluate_quartic

CARDINALITY_EPS = 1e-6
SUMMARY_COLUMNS = ('rmse_mean', 'rmse_p95', 'cardinality', 'l1_norm', 'roughness', 'solve_time_s')


def _coords(mesh):
    return mesh.coords if isinstance(mesh, Mesh) else Mesh(mesh).coords


def vertex_errors(reconstruction, clean):
    """Euclidean error of every vertex."""
    a, b = _coords(reconstruction), _coords(clean)
    if a.size != b.size:
        raise ContractError(f'meshes differ in size: {a.size} vs {b.size}')
    if a.size == 0:
        raise ContractError('cannot measure an empty mesh')
    return np.linalg.norm((a - b).reshape(-1, 3), axis=1)


def rmse_mean(reconstruction, clean):
    """sqrt(||f(w) - clean||^2 / n); the divisor is the vertex count, not 3n."""
    errors = vertex_errors(reconstruction, clean)
    return float(np.sqrt(np.sum(errors ** 2) / errors.size))


def rmse_p95(reconstruction, clean):
    """Nearest-rank 95th percentile of the per-vertex errors."""
    errors = vertex_errors(reconstruction, clean)
    return float(np.percentile(errors, 95, method='inverted_cdf'))


def cardinality(w, eps=CARDINALITY_EPS):
    return int(np.sum(np.abs(np.asarray(w, dtype=float)) > eps))


def l1_norm(w):
    return float(np.sum(np.abs(np.asarray(w, dtype=float))))


def support_overlap(w, truth, eps=CARDINALITY_EPS):
    """Jaccard overlap of the active sets of w and truth; 1 when both are empty."""
    a = np.abs(np.asarray(w, dtype=float)) > eps
    b = np.abs(np.asarray(truth, dtype=float)) > eps
    if a.shape != b.shape:
        raise ContractError(f'weight vectors differ in shape: {a.shape} vs {b.shape}')
    union = int(np.sum(a | b))
    return 1.0 if union == 0 else int(np.sum(a & b)) / union


def roughness(track):
    """Sum of squared second differences of one weight over time; 0 for fewer than 3 frames."""
    track = np.asarray(track, dtype=float)
    if track.size < 3:
        return 0.0
    return float(np.sum(np.diff(track, n=2) ** 2))


def roughness_per_weight(weights):
    """Roughness of every column of an (N, m) weight sequence."""
    weights = np.atleast_2d(np.asarray(weights, dtype=float))
    return np.array([roughness(weights[:, j]) for j in range(weights.shape[1])])


@dataclass
class FrameMetrics:
    frame_id: int
    rmse_mean: float
    rmse_p95: float
    cardinality: int
    l1_norm: float
    solve_time_s: float = 0.0


# roughness is a sequence metric: blank on frame rows, filled on the closing summary row
FRAME_COLUMNS = ('frame_id',) + SUMMARY_COLUMNS


@dataclass
class MetricTable:
    per_frame: list
    per_weight_roughness: np.ndarray
    # how the per-weight roughness values are reduced to one number
    roughness_aggregate: str = 'mean'

    def aggregates(self):
        rows = self.per_frame
        if not rows:
            raise ContractError('metric table has no frames')
        summary = {
            name: float(np.mean([getattr(row, name) for row in rows]))
            for name in ('rmse_mean', 'rmse_p95', 'cardinality', 'l1_norm', 'solve_time_s')
        }
        summary['roughness'] = float(np.mean(self.per_weight_roughness)) if self.per_weight_roughness.size else 0.0
        return {name: summary[name] for name in SUMMARY_COLUMNS}

    def write_csv(self, stream):
        """One row per frame, then a ``mean`` row holding the sequence aggregates."""
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(FRAME_COLUMNS)
        for row in self.per_frame:
            values = asdict(row)
            writer.writerow([values.get(name, '') for name in FRAME_COLUMNS])
        summary = {'frame_id': self.roughness_aggregate, **self.aggregates()}
        writer.writerow([summary[name] for name in FRAME_COLUMNS])


def frame_metrics(rig, w, clean, frame_id=0, solve_time=0.0, eps=CARDINALITY_EPS):
    """Metrics of one fitted frame. Reconstruction always uses the full quartic rig."""
    reconstruction = evaluate_quartic(rig, w)
    return FrameMetrics(
        frame_id=int(frame_id),
        rmse_mean=rmse_mean(reconstruction, clean),
        rmse_p95=rmse_p95(reconstruction, clean),
        cardinality=cardinality(w, eps),
        l1_norm=l1_norm(w),
        solve_time_s=float(solve_time),
    )


def evaluate_sequence(rig, weights, clean_frames, times=None, eps=CARDINALITY_EPS):
    weights = np.atleast_2d(np.asarray(weights, dtype=float))
    clean_frames = np.atleast_2d(np.asarray(clean_frames, dtype=float))
    if weights.shape[0] != clean_frames.shape[0]:
        raise ContractError(f'{weights.shape[0]} weight frames but {clean_frames.shape[0]} clean meshes')
    times = np.zeros(weights.shape[0]) if times is None else np.asarray(times, dtype=float)
    rows = [
        frame_metrics(rig, w, clean, frame_id=t, solve_time=times[t], eps=eps)
        for t, (w, clean) in enumerate(zip(weights, clean_frames))
    ]
    return MetricTable(per_frame=rows, per_weight_roughness=roughness_per_weight(weights))
