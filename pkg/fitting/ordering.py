"""Coordinate visit orders for the sequential solvers.

Static strategies produce one permutation per frame. Dynamic strategies pick
the next coordinate from the current iterate, at most once per coordinate in
a pass, so a pass never exceeds m updates whatever the strategy.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .exceptions import ContractError
from .objective import DEGENERATE_NORM, coordinate_step, step_change
from .rig import RigKind

logger = logging.getLogger(__name__)

MIN_IMPROVEMENT = 1e-12


class OrderingKind(str, Enum):
    DECREASING_MAGNITUDE = 'decreasing-magnitude'
    INCREASING_MAGNITUDE = 'increasing-magnitude'
    RANDOM = 'random'
    FRAME_CORRELATION = 'frame-correlation'
    ITERATION_CORRELATION = 'iteration-correlation'
    GAUSS_SOUTHWELL = 'gauss-southwell'
    MAXIMUM_IMPROVEMENT = 'maximum-improvement'


STATIC_KINDS = frozenset({
    OrderingKind.DECREASING_MAGNITUDE,
    OrderingKind.INCREASING_MAGNITUDE,
    OrderingKind.RANDOM,
    OrderingKind.FRAME_CORRELATION,
})
DYNAMIC_KINDS = frozenset(OrderingKind) - STATIC_KINDS


@dataclass(frozen=True)
class OrderingStrategy:
    kind: OrderingKind = OrderingKind.DECREASING_MAGNITUDE
    seed: int = None
    # cosine similarity instead of the raw inner product for the correlation kinds
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'kind', OrderingKind(self.kind))
        if self.kind == OrderingKind.RANDOM and self.seed is None:
            raise ContractError('random ordering needs an explicit seed')

    @property
    def is_dynamic(self):
        return self.kind in DYNAMIC_KINDS


@dataclass
class VisitState:
    """Per-pass bookkeeping for the dynamic strategies. Owned by the caller."""

    visited: np.ndarray
    budget: int
    picks: int = 0
    trace: list = field(default_factory=list)

    @classmethod
    def fresh(cls, m):
        return cls(visited=np.zeros(m, dtype=bool), budget=m)

    @property
    def exhausted(self):
        return self.picks >= self.budget

    def mark(self, i):
        self.visited[i] = True
        self.picks += 1
        self.trace.append(int(i))


def descending(scores):
    """Indices sorted by descending score, ties broken by ascending index."""
    scores = np.asarray(scores, dtype=float)
    return np.lexsort((np.arange(scores.size), -scores))


def correlation_scores(rig, residual, normalized=False):
    scores = rig.basis.T @ residual
    if normalized:
        scale = np.sqrt(rig.squared_norms) * np.linalg.norm(residual)
        scores = np.divide(scores, scale, out=np.zeros_like(scores), where=scale > 0)
    return scores


def static_order(rig, strategy, target=None, seed=None):
    """One permutation of range(m) for a whole frame."""
    if strategy.kind not in STATIC_KINDS:
        raise ContractError(f'{strategy.kind.value} is not a static ordering')
    if strategy.kind == OrderingKind.DECREASING_MAGNITUDE:
        return descending(rig.squared_norms)
    if strategy.kind == OrderingKind.INCREASING_MAGNITUDE:
        return descending(rig.squared_norms)[::-1].copy()
    if strategy.kind == OrderingKind.RANDOM:
        rng = np.random.default_rng(strategy.seed if seed is None else seed)
        return rng.permutation(rig.m)
    if target is None:
        raise ContractError('frame correlation ordering needs a target mesh')
    target = rig.check_mesh(target)
    return descending(correlation_scores(rig, target.coords - rig.neutral.coords, strategy.normalized))


def _pick(scores, candidates):
    masked = np.where(candidates, scores, -np.inf)
    # argmax returns the first maximum, i.e. the lowest index on ties
    return int(np.argmax(masked))


def gauss_southwell_candidates(w, gradient):
    """Coordinates with a feasible descent direction under the box [0, 1]."""
    outward_low = (w <= 0.0) & (gradient >= 0.0)
    outward_high = (w >= 1.0) & (gradient <= 0.0)
    return ~outward_low & ~outward_high & (gradient != 0.0)


def next_coordinate_dynamic(rig, w, target, strategy, alpha, state, kind=RigKind.QUARTIC):
    """Pick and mark the next coordinate to update, or return None when the pass is done."""
    if strategy.kind not in DYNAMIC_KINDS:
        raise ContractError(f'{strategy.kind.value} is not a dynamic ordering')
    if state.exhausted:
        return None
    w = rig.check_weights(w)
    target = rig.check_mesh(target)
    residual = rig.neutral.coords + rig.deformation(w, kind) - target.coords
    candidates = ~state.visited

    if strategy.kind == OrderingKind.ITERATION_CORRELATION:
        pick = _pick(correlation_scores(rig, -residual, strategy.normalized), candidates)

    elif strategy.kind == OrderingKind.GAUSS_SOUTHWELL:
        gradient = rig.jacobian_transpose_dot(w, residual, kind) + alpha
        candidates &= gauss_southwell_candidates(w, gradient)
        if not candidates.any():
            return None
        pick = _pick(np.abs(gradient), candidates)

    else:
        changes = np.full(rig.m, np.inf)
        for i in np.flatnonzero(candidates):
            phi = rig.phi(w, i, kind)
            new, _ = coordinate_step(phi, residual - w[i] * phi, alpha, w[i], DEGENERATE_NORM)
            changes[i] = step_change(phi, residual, alpha, w[i], new)
        pick = int(np.argmin(changes))
        if not -changes[pick] >= MIN_IMPROVEMENT:
            return None

    state.mark(pick)
    return pick
