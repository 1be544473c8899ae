"""Inverse-rig solvers.

Every solver works on the delta target ``target - neutral`` and exports weights
inside [0, 1]. The coordinate-descent solvers keep the residual
``f(w) - target`` up to date after each scalar update, which is exact because
the rig function is affine in any single weight.
"""
import logging
import time
import weakref
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import linalg

from .exceptions import ContractError, DescentViolation
from .objective import (
    DEGENERATE_NORM,
    coordinate_step,
    objective_from_residual,
    objective_value,
    project_unit_interval,
)
from .ordering import OrderingStrategy, VisitState, next_coordinate_dynamic, static_order
from .rig import RigKind

logger = logging.getLogger(__name__)

PINV_CUTOFF = 1e-10
CARDINALITY_EPS = 1e-6


class Method(str, Enum):
    CD_QUARTIC = 'CD_QUARTIC'
    CD_LINEAR = 'CD_LINEAR'
    SEOL = 'SEOL'
    JOSHI = 'JOSHI'
    CETINASLAN = 'CETINASLAN'

    @property
    def sequential(self):
        return self in (Method.CD_QUARTIC, Method.CD_LINEAR, Method.SEOL)

    @property
    def regularized(self):
        return self in (Method.CD_QUARTIC, Method.CD_LINEAR, Method.CETINASLAN)

    @property
    def rig_kind(self):
        return RigKind.QUARTIC if self == Method.CD_QUARTIC else RigKind.LINEAR


@dataclass(frozen=True)
class SolverConfig:
    method: Method = Method.CD_QUARTIC
    alpha: float = 0.0
    passes: int = 1
    ordering: OrderingStrategy = field(default_factory=OrderingStrategy)
    init: np.ndarray = None
    seol_clip_in_loop: bool = False
    check_descent: bool = False
    degenerate_norm: float = DEGENERATE_NORM
    pinv_cutoff: float = PINV_CUTOFF

    def __post_init__(self):
        object.__setattr__(self, 'method', Method(self.method))
        if not self.alpha >= 0:
            raise ContractError(f'alpha must be >= 0, got {self.alpha}')
        if self.passes < 1:
            raise ContractError(f'passes must be >= 1, got {self.passes}')


@dataclass
class SolveReport:
    method: Method
    weights: np.ndarray
    objective_trace: list = field(default_factory=list)
    coordinate_visits: int = 0
    degenerate_visits: int = 0
    wall_time: float = 0.0
    # weights before the export clip; only the clipping baselines set it
    pre_clip_weights: np.ndarray = None
    update_objectives: list = field(default_factory=list)

    @property
    def pre_clip_cardinality(self):
        if self.pre_clip_weights is None:
            return None
        return int(np.sum(np.abs(self.pre_clip_weights) > CARDINALITY_EPS))


def _delta_target(rig, target):
    target = rig.check_mesh(target)
    return target.coords - rig.neutral.coords


def _initial_weights(rig, init):
    if init is None:
        return np.zeros(rig.m)
    w = rig.check_weights(init).copy()
    if np.any(w < 0) or np.any(w > 1):
        raise ContractError('initial weights must lie in [0, 1]')
    return w


def coordinate_update_quartic(rig, w, i, target, alpha, eps=DEGENERATE_NORM):
    """Box-constrained minimiser of the quartic objective along coordinate i."""
    return _coordinate_update(rig, w, i, target, alpha, RigKind.QUARTIC, eps)


def coordinate_update_linear(rig, w, i, target, alpha, eps=DEGENERATE_NORM):
    """Same as the quartic update with phi = b_i and the corrections ignored."""
    return _coordinate_update(rig, w, i, target, alpha, RigKind.LINEAR, eps)


def _coordinate_update(rig, w, i, target, alpha, kind, eps):
    w = rig.check_weights(w)
    i = rig.check_index(i)
    phi = rig.phi(w, i, kind)
    residual = rig.deformation(w, kind) - _delta_target(rig, target)
    value, _ = coordinate_step(phi, residual - w[i] * phi, alpha, w[i], eps)
    return value


class _Descent:
    """State of one coordinate-descent fit: iterate, residual and counters."""

    def __init__(self, rig, target, config):
        self.rig = rig
        self.target = target
        self.config = config
        self.kind = config.method.rig_kind
        self.w = _initial_weights(rig, config.init)
        self.delta = _delta_target(rig, target)
        self.residual = rig.deformation(self.w, self.kind) - self.delta
        self.visits = 0
        self.degenerate = 0
        self.update_objectives = []

    def update(self, i):
        w, alpha = self.w, self.config.alpha
        phi = self.rig.phi(w, i, self.kind)
        psi = self.residual - w[i] * phi
        new, degenerate = coordinate_step(phi, psi, alpha, w[i], self.config.degenerate_norm)
        self.visits += 1
        if degenerate:
            self.degenerate += 1
            logger.debug('coordinate %d is degenerate (||phi||^2 below threshold)', i)
        if self.config.check_descent:
            before = objective_from_residual(self.residual, w, alpha)
        if new != w[i]:
            w[i] = new
            self.residual = psi + new * phi
        if self.config.check_descent:
            after = objective_from_residual(self.residual, w, alpha)
            if after > before + 1e-10 * (1.0 + abs(before)):
                raise DescentViolation(f'update of coordinate {i} raised the objective from {before!r} to {after!r}')
            self.update_objectives.append(after)

    def run_pass(self, order):
        for i in order:
            self.update(int(i))

    def run_dynamic_pass(self):
        state = VisitState.fresh(self.rig.m)
        while True:
            i = next_coordinate_dynamic(
                self.rig, self.w, self.target, self.config.ordering, self.config.alpha, state, self.kind)
            if i is None:
                break
            self.update(i)
        return state

    def objective(self):
        return objective_value(self.rig, self.w, self.target, self.config.alpha, self.kind)


def fit_coordinate_descent(rig, target, config):
    """Projected coordinate descent over T passes on the linear or quartic rig."""
    if config.method not in (Method.CD_QUARTIC, Method.CD_LINEAR):
        raise ContractError(f'coordinate descent does not run {config.method.value}')
    start = time.perf_counter()
    target = rig.check_mesh(target)
    descent = _Descent(rig, target, config)
    strategy = config.ordering
    order = None if strategy.is_dynamic else static_order(rig, strategy, target)
    trace = []
    for t in range(config.passes):
        if order is None:
            descent.run_dynamic_pass()
        else:
            descent.run_pass(order)
        trace.append(descent.objective())
        logger.debug('%s pass %d objective %.12g', config.method.value, t + 1, trace[-1])
    return SolveReport(
        method=config.method,
        weights=descent.w,
        objective_trace=trace,
        coordinate_visits=descent.visits,
        degenerate_visits=descent.degenerate,
        wall_time=time.perf_counter() - start,
        update_objectives=descent.update_objectives,
    )


def fit_seol(rig, target, ordering=None, passes=1, clip_in_loop=False, eps=DEGENERATE_NORM):
    """Sequential non-negative fit of the linear rig, one blendshape at a time.

    Residual starts at the delta target; each visit sets
    w_i = max(0, b_i.r / ||b_i||^2) and removes w_i b_i from the residual.
    Later passes add the coordinate's own contribution back first. The upper
    bound is only applied at export unless ``clip_in_loop`` is set.
    """
    start = time.perf_counter()
    ordering = ordering or OrderingStrategy()
    if ordering.is_dynamic:
        raise ContractError('Seol supports static orderings only')
    target = rig.check_mesh(target)
    order = static_order(rig, ordering, target)
    w = np.zeros(rig.m)
    r = _delta_target(rig, target)
    visits = degenerate = 0
    trace = []
    for _ in range(passes):
        for i in order:
            b = rig.basis[:, i]
            norm2 = float(b @ b)
            visits += 1
            if norm2 < eps:
                degenerate += 1
                continue
            if w[i] != 0.0:
                r = r + w[i] * b
            value = max(0.0, float(b @ r) / norm2)
            if clip_in_loop:
                value = min(1.0, value)
            w[i] = value
            r = r - value * b
        trace.append(0.5 * float(r @ r))
    exported = np.clip(w, 0.0, 1.0)
    return SolveReport(
        method=Method.SEOL,
        weights=exported,
        objective_trace=trace,
        coordinate_visits=visits,
        degenerate_visits=degenerate,
        wall_time=time.perf_counter() - start,
        pre_clip_weights=w,
    )


# per-rig cache of pseudo-inverses and ridge factorisations
_factor_cache = weakref.WeakKeyDictionary()


def _cached(rig, key, build):
    entries = _factor_cache.setdefault(rig, {})
    if key not in entries:
        entries[key] = build()
    return entries[key]


def pseudo_inverse(rig, cutoff=PINV_CUTOFF):
    """B^+ with singular values below cutoff * sigma_max treated as zero."""
    return _cached(rig, ('pinv', cutoff), lambda: np.linalg.pinv(rig.basis, rcond=cutoff))


def fit_joshi(rig, target, cutoff=PINV_CUTOFF):
    """Unconstrained least squares through the pseudo-inverse, clipped at export."""
    start = time.perf_counter()
    raw = pseudo_inverse(rig, cutoff) @ _delta_target(rig, target)
    return SolveReport(
        method=Method.JOSHI,
        weights=np.clip(raw, 0.0, 1.0),
        objective_trace=[0.5 * float(np.sum((rig.basis @ raw - _delta_target(rig, target)) ** 2))],
        wall_time=time.perf_counter() - start,
        pre_clip_weights=raw,
    )


def fit_cetinaslan(rig, target, alpha, cutoff=PINV_CUTOFF):
    """Ridge solution of (B^T B + 2 alpha I) w = B^T d, clipped at export."""
    if not alpha >= 0:
        raise ContractError(f'alpha must be >= 0, got {alpha}')
    if alpha == 0:
        report = fit_joshi(rig, target, cutoff)
        report.method = Method.CETINASLAN
        return report
    start = time.perf_counter()
    factor = _cached(rig, ('ridge', alpha), lambda: linalg.cho_factor(
        rig.basis.T @ rig.basis + 2.0 * alpha * np.eye(rig.m)))
    delta = _delta_target(rig, target)
    raw = linalg.cho_solve(factor, rig.basis.T @ delta)
    residual = rig.basis @ raw - delta
    return SolveReport(
        method=Method.CETINASLAN,
        weights=np.clip(raw, 0.0, 1.0),
        objective_trace=[0.5 * float(residual @ residual) + alpha * float(raw @ raw)],
        wall_time=time.perf_counter() - start,
        pre_clip_weights=raw,
    )


def fit_projected_gradient(rig, target, alpha, tol=1e-14, max_iter=200000):
    """Reference solver for the convex (linear rig) problem.

    Projected gradient with step 1/L, L = sigma_max(B)^2, run until the
    iterate stops moving.
    """
    start = time.perf_counter()
    delta = _delta_target(rig, target)
    lipschitz = np.linalg.norm(rig.basis, 2) ** 2
    if lipschitz == 0:
        w = np.zeros(rig.m)
        return SolveReport(method=Method.CD_LINEAR, weights=w, objective_trace=[0.5 * float(delta @ delta)])
    w = np.zeros(rig.m)
    for _ in range(max_iter):
        gradient = rig.basis.T @ (rig.basis @ w - delta) + alpha
        moved = np.clip(w - gradient / lipschitz, 0.0, 1.0)
        if np.linalg.norm(moved - w) <= tol:
            w = moved
            break
        w = moved
    else:
        logger.warning('projected gradient stopped after %d iterations', max_iter)
    residual = rig.basis @ w - delta
    return SolveReport(
        method=Method.CD_LINEAR,
        weights=w,
        objective_trace=[objective_from_residual(residual, w, alpha)],
        wall_time=time.perf_counter() - start,
    )


def fit(rig, target, config):
    """Dispatch one frame to the solver named by ``config.method``."""
    if config.method in (Method.CD_QUARTIC, Method.CD_LINEAR):
        return fit_coordinate_descent(rig, target, config)
    if config.method == Method.SEOL:
        return fit_seol(rig, target, config.ordering, config.passes, config.seol_clip_in_loop,
                        config.degenerate_norm)
    if config.method == Method.JOSHI:
        return fit_joshi(rig, target, config.pinv_cutoff)
    return fit_cetinaslan(rig, target, config.alpha, config.pinv_cutoff)


__all__ = [
    'Method', 'SolverConfig', 'SolveReport', 'project_unit_interval',
    'coordinate_update_quartic', 'coordinate_update_linear', 'fit_coordinate_descent',
    'fit_seol', 'fit_joshi', 'fit_cetinaslan', 'fit_projected_gradient', 'objective_value', 'fit',
    'pseudo_inverse',
]
