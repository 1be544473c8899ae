"""Experiment protocol: fit sequences, evaluate them, sweep and compare.

Frames are fitted independently. With more than one thread they run on a
pool, but results are always gathered in frame order and every source of
randomness is seeded per frame, so output does not depend on scheduling.
"""
import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import ContractError
from .metrics import SUMMARY_COLUMNS, cardinality, evaluate_sequence, l1_norm, roughness_per_weight
from .ordering import OrderingKind, OrderingStrategy
from .rig import Mesh
from .solvers import Method, SolverConfig, fit
from .synthetic import SELECTED_ALPHA, frame_seed, noisy_sequence

logger = logging.getLogger(__name__)

ALPHA_GRID = (0.0, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0)
SIGMA2_GRID = (0.0, 0.01, 0.02, 0.03, 0.05, 0.1)
PASSES_GRID = (1, 5)
COMPARISON_ALPHA = 0.5
NOISE_STUDY_METHODS = (Method.SEOL, Method.CD_QUARTIC, Method.CETINASLAN)
NOISE_STUDY_ALPHAS = (0.0, 0.1, 1.0)

TABLE_COLUMNS = ('label', 'method', 'passes', 'alpha', 'ordering') + SUMMARY_COLUMNS
NOISE_COLUMNS = ('sigma2', 'method', 'alpha', 'frame_id', 'rmse_mean', 'cardinality')


def solver_config(method, alpha=0.0, passes=1, ordering=None, **options):
    """SolverConfig with the unregularised baselines pinned to alpha = 0."""
    method = Method(method)
    if not method.regularized:
        alpha = 0.0
    if method == Method.JOSHI or method == Method.CETINASLAN:
        passes = 1
    return SolverConfig(method=method, alpha=alpha, passes=passes,
                        ordering=ordering or OrderingStrategy(), **options)


def label(config):
    return f'{config.method.value}-{config.passes}'


@dataclass
class SequenceFit:
    config: SolverConfig
    weights: np.ndarray
    reports: list = field(default_factory=list)

    @property
    def times(self):
        return np.array([report.wall_time for report in self.reports])


def _frame_config(config, t, seed):
    if config.ordering.kind != OrderingKind.RANDOM:
        return config
    base = config.ordering.seed if seed is None else seed
    return replace(config, ordering=replace(config.ordering, seed=frame_seed(base, t)))


def fit_sequence(rig, targets, config, threads=1, seed=None):
    """Fit every frame of an (N, 3n) target array independently."""
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    if targets.shape[0] and targets.shape[1] != 3 * rig.n:
        raise ContractError(f'target frames have {targets.shape[1]} values, rig expects {3 * rig.n}')

    def fit_frame(t):
        return fit(rig, Mesh(targets[t]), _frame_config(config, t, seed))

    frames = range(targets.shape[0])
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(fit_frame, frames))
    else:
        reports = [fit_frame(t) for t in frames]
    weights = np.array([report.weights for report in reports]).reshape(len(reports), rig.m)
    logger.info('%s alpha=%g fitted %d frames', label(config), config.alpha, len(reports))
    return SequenceFit(config=config, weights=weights, reports=reports)


def evaluate_fit(rig, sequence_fit, clean, omit_timing=False):
    clean.require_clean().check_against(rig)
    times = None if omit_timing else sequence_fit.times
    return evaluate_sequence(rig, sequence_fit.weights, clean.frames, times)


def summary_row(sequence_fit, table, row_label=None):
    config = sequence_fit.config
    row = {
        'label': row_label or label(config),
        'method': config.method.value,
        'passes': config.passes,
        'alpha': config.alpha,
        'ordering': config.ordering.kind.value if config.method.sequential else '',
    }
    row.update(table.aggregates())
    return row


def run_cell(rig, targets, clean, config, threads=1, seed=None, omit_timing=False, row_label=None):
    sequence_fit = fit_sequence(rig, targets, config, threads, seed)
    table = evaluate_fit(rig, sequence_fit, clean, omit_timing)
    return summary_row(sequence_fit, table, row_label)


def sweep_configs(methods, alpha_grid, passes_grid=PASSES_GRID, ordering=None, **options):
    """Cells of the accuracy/sparsity trade-off: one per method, passes and alpha."""
    for method in map(Method, methods):
        if method == Method.JOSHI:
            yield solver_config(method, ordering=ordering, **options)
        elif method == Method.CETINASLAN:
            for alpha in alpha_grid:
                yield solver_config(method, alpha, ordering=ordering, **options)
        elif method == Method.SEOL:
            for passes in passes_grid:
                yield solver_config(method, passes=passes, ordering=ordering, **options)
        else:
            for passes in passes_grid:
                for alpha in alpha_grid:
                    yield solver_config(method, alpha, passes, ordering, **options)


def sweep(rig, targets, clean, methods=tuple(Method), alpha_grid=ALPHA_GRID, passes_grid=PASSES_GRID,
          ordering=None, threads=1, seed=None, omit_timing=False, **options):
    return [
        run_cell(rig, targets, clean, config, threads, seed, omit_timing)
        for config in sweep_configs(methods, alpha_grid, passes_grid, ordering, **options)
    ]


def compare_orderings(rig, targets, clean, alpha=COMPARISON_ALPHA, passes=1, method=Method.CD_QUARTIC,
                      kinds=tuple(OrderingKind), threads=1, seed=0, omit_timing=False, normalized=False,
                      **options):
    rows = []
    for kind in map(OrderingKind, kinds):
        strategy = OrderingStrategy(kind, seed=seed if kind == OrderingKind.RANDOM else None, normalized=normalized)
        config = solver_config(method, alpha, passes, strategy, **options)
        rows.append(run_cell(rig, targets, clean, config, threads, seed, omit_timing, row_label=kind.value))
    return rows


def ground_truth_row(truth_weights):
    truth = np.atleast_2d(np.asarray(truth_weights, dtype=float))
    return {
        'label': 'ground-truth', 'method': '', 'passes': '', 'alpha': '', 'ordering': '',
        'rmse_mean': 0.0, 'rmse_p95': 0.0,
        'cardinality': float(np.mean([cardinality(w) for w in truth])) if len(truth) else 0.0,
        'l1_norm': float(np.mean([l1_norm(w) for w in truth])) if len(truth) else 0.0,
        'roughness': float(np.mean(roughness_per_weight(truth))) if truth.size else 0.0,
        'solve_time_s': 0.0,
    }


def benchmark(rig, targets, clean, truth_weights, character='ada', passes=5, ordering=None,
              threads=1, seed=None, omit_timing=False, **options):
    """Every method at its selected alpha, plus the ground-truth reference line."""
    alphas = SELECTED_ALPHA[character]
    configs = [
        solver_config(Method.CD_QUARTIC, alphas['CD_QUARTIC'], passes, ordering, **options),
        solver_config(Method.CD_LINEAR, alphas['CD_LINEAR'], passes, ordering, **options),
        solver_config(Method.SEOL, 0.0, 1, ordering, **options),
        solver_config(Method.JOSHI, **options),
        solver_config(Method.CETINASLAN, alphas['CETINASLAN'], **options),
    ]
    rows = [run_cell(rig, targets, clean, config, threads, seed, omit_timing) for config in configs]
    rows.append(ground_truth_row(truth_weights))
    return rows


def noise_study(rig, clean, sigma2_grid=SIGMA2_GRID, frames=100, methods=NOISE_STUDY_METHODS,
                alphas=NOISE_STUDY_ALPHAS, passes=5, seed=0, threads=1, **options):
    """Per-frame error and cardinality under increasing noise, always scored on clean meshes."""
    clean.require_clean().check_against(rig)
    subset = replace(clean, frames=clean.frames[:frames])
    rows = []
    for sigma2 in sigma2_grid:
        targets = noisy_sequence(subset, sigma2, seed).frames
        for method in map(Method, methods):
            grid = alphas if method.regularized else (0.0,)
            for alpha in grid:
                config = solver_config(method, alpha, passes if method != Method.SEOL else 1, **options)
                table = evaluate_fit(rig, fit_sequence(rig, targets, config, threads, seed), subset, True)
                for row in table.per_frame:
                    rows.append({
                        'sigma2': sigma2, 'method': method.value, 'alpha': alpha, 'frame_id': row.frame_id,
                        'rmse_mean': row.rmse_mean, 'cardinality': row.cardinality,
                    })
        logger.info('noise study sigma2=%g done', sigma2)
    return rows


def write_rows(stream, columns, rows):
    writer = csv.DictWriter(stream, fieldnames=columns, lineterminator='\n', extrasaction='ignore')
    writer.writeheader()
    writer.writerows(rows)
