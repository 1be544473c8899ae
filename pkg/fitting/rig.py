"""Blendshape rigs with pair, triplet and quadruplet corrective terms.

Blendshape indices are 0-based everywhere in code and files. A rig stores
its blendshapes as the columns of a ``(3n, m)`` matrix and groups corrective
terms by level so that the quartic rig function reduces to one
matrix-vector product per level.
"""
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import ContractError, RigDimensionError

logger = logging.getLogger(__name__)

LEVELS = (2, 3, 4)


class RigKind(str, Enum):
    LINEAR = 'linear'
    QUARTIC = 'quartic'


@dataclass(frozen=True, eq=False)
class Mesh:
    """A 3n vector of vertex coordinates (x, y, z per vertex, centimeters)."""

    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float)
        if coords.ndim != 1 or coords.size % 3:
            raise ContractError(f'mesh vector must be 1-D with length 3n, got shape {coords.shape}')
        if not np.all(np.isfinite(coords)):
            raise ContractError('mesh coordinates must be finite')
        coords.setflags(write=False)
        object.__setattr__(self, 'coords', coords)

    @property
    def n(self):
        return self.coords.size // 3

    @property
    def vertices(self):
        return self.coords.reshape(-1, 3)

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash(self.coords.tobytes())


@dataclass(frozen=True, eq=False)
class CorrectiveTerm:
    indices: tuple
    offset: np.ndarray

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        if len(indices) not in LEVELS:
            raise ContractError(f'corrective term must combine 2, 3 or 4 blendshapes, got {indices}')
        if any(i < 0 for i in indices) or any(a >= b for a, b in zip(indices, indices[1:])):
            raise ContractError(f'corrective indices must be strictly increasing and non-negative, got {indices}')
        offset = np.array(self.offset, dtype=float)
        if offset.ndim != 1:
            raise ContractError('corrective offset must be a vector')
        offset.setflags(write=False)
        object.__setattr__(self, 'indices', indices)
        object.__setattr__(self, 'offset', offset)

    @property
    def level(self):
        return len(self.indices)


class _Level:
    """All corrective terms of one level, stacked for vectorised evaluation."""

    def __init__(self, level, terms, n3):
        self.level = level
        self.terms = tuple(terms)
        self.indices = np.array([t.indices for t in terms], dtype=np.intp).reshape(len(terms), level)
        self.offsets = np.column_stack([t.offset for t in terms]) if terms else np.zeros((n3, 0))
        self.indices.setflags(write=False)
        self.offsets.setflags(write=False)

    def __len__(self):
        return len(self.terms)

    def products(self, w):
        return np.prod(w[self.indices], axis=1)


class BlendshapeRig:
    """Neutral mesh, delta blendshapes and corrective terms up to quartic order.

    Immutable after construction; safe to share between fitting workers.
    """

    def __init__(self, neutral, blendshapes, corrections=()):
        self.neutral = neutral if isinstance(neutral, Mesh) else Mesh(neutral)
        basis = np.array(blendshapes, dtype=float)
        if basis.ndim != 2 or basis.shape[0] != self.neutral.coords.size:
            raise RigDimensionError(
                f'blendshape matrix must have shape (3n, m) = ({self.neutral.coords.size}, m), got {basis.shape}')
        if not np.all(np.isfinite(basis)):
            raise ContractError('blendshape offsets must be finite')
        basis.setflags(write=False)
        self.basis = basis

        terms = sorted(corrections, key=lambda t: (t.level, t.indices))
        seen = set()
        for term in terms:
            if term.indices in seen:
                raise ContractError(f'duplicate corrective term {term.indices}')
            if term.indices[-1] >= self.m:
                raise ContractError(f'corrective term {term.indices} references a blendshape >= m={self.m}')
            if term.offset.size != self.neutral.coords.size:
                raise RigDimensionError(f'corrective term {term.indices} has length {term.offset.size}')
            seen.add(term.indices)
        n3 = self.neutral.coords.size
        self._levels = tuple(_Level(lvl, [t for t in terms if t.level == lvl], n3) for lvl in LEVELS)
        self._incidence = self._build_incidence()

        norms = np.einsum('ij,ij->j', basis, basis)
        norms.setflags(write=False)
        self.squared_norms = norms
        if np.any(norms == 0):
            logger.debug('rig has %d zero-norm blendshapes', int(np.sum(norms == 0)))

    def _build_incidence(self):
        # incidence[i] holds, per level, the term columns containing i and their partner indices
        incidence = [[] for _ in range(self.m)]
        for level in self._levels:
            rows = [[] for _ in range(self.m)]
            for k, idx in enumerate(level.indices):
                for i in idx:
                    rows[i].append(k)
            for i in range(self.m):
                cols = np.array(rows[i], dtype=np.intp)
                partners = level.indices[cols]
                partners = partners[partners != i].reshape(len(cols), level.level - 1)
                incidence[i].append((level, cols, partners))
        return incidence

    @property
    def m(self):
        return self.basis.shape[1]

    @property
    def n(self):
        return self.neutral.n

    @property
    def pairs(self):
        return self._levels[0].terms

    @property
    def triplets(self):
        return self._levels[1].terms

    @property
    def quads(self):
        return self._levels[2].terms

    @property
    def corrections(self):
        return self.pairs + self.triplets + self.quads

    @property
    def has_corrections(self):
        return any(len(level) for level in self._levels)

    def check_weights(self, w):
        w = np.asarray(w, dtype=float)
        if w.shape != (self.m,):
            raise RigDimensionError(f'weight vector must have length m={self.m}, got shape {w.shape}')
        return w

    def check_mesh(self, mesh):
        if not isinstance(mesh, Mesh):
            mesh = Mesh(mesh)
        if mesh.n != self.n:
            raise RigDimensionError(f'mesh has {mesh.n} vertices, rig has {self.n}')
        return mesh

    def check_index(self, i):
        if not 0 <= i < self.m:
            raise ContractError(f'blendshape index {i} out of range [0, {self.m})')
        return int(i)

    def deformation(self, w, kind=RigKind.QUARTIC):
        """Offset from the neutral: Bw, plus the corrective terms for the quartic rig."""
        w = self.check_weights(w)
        delta = self.basis @ w
        if kind == RigKind.QUARTIC:
            for level in self._levels:
                if len(level):
                    delta = delta + level.offsets @ level.products(w)
        return delta

    def phi(self, w, i, kind=RigKind.QUARTIC):
        """Everything multiplied by w_i in the rig function; w_i itself does not enter."""
        phi = self.basis[:, i].copy()
        if kind == RigKind.QUARTIC:
            for level, cols, partners in self._incidence[i]:
                if cols.size:
                    phi += level.offsets[:, cols] @ np.prod(w[partners], axis=1)
        return phi

    def jacobian_transpose_dot(self, w, r, kind=RigKind.QUARTIC):
        """Return J(w)^T r, the columns of J being phi(w, i) for every i."""
        w = self.check_weights(w)
        g = self.basis.T @ r
        if kind == RigKind.QUARTIC:
            for level in self._levels:
                if not len(level):
                    continue
                c = level.offsets.T @ r
                factors = w[level.indices]
                for p in range(level.level):
                    others = np.prod(np.delete(factors, p, axis=1), axis=1)
                    np.add.at(g, level.indices[:, p], c * others)
        return g


def evaluate_linear(rig, w):
    """f_L(w) = b0 + Bw."""
    return Mesh(rig.neutral.coords + rig.deformation(w, RigKind.LINEAR))


def evaluate_quartic(rig, w):
    """f_Q(w): the linear rig plus every pair, triplet and quadruplet correction."""
    return Mesh(rig.neutral.coords + rig.deformation(w, RigKind.QUARTIC))


def evaluate(rig, w, kind=RigKind.QUARTIC):
    return evaluate_quartic(rig, w) if kind == RigKind.QUARTIC else evaluate_linear(rig, w)


def phi(rig, w, i, kind=RigKind.QUARTIC):
    w = rig.check_weights(w)
    return rig.phi(w, rig.check_index(i), kind)


def psi(rig, w, i, target, kind=RigKind.QUARTIC):
    """All rig terms free of w_i, the neutral included, minus the target.

    Satisfies f(w) - target == w_i * phi(i) + psi(i) for any value of w_i.
    """
    w = rig.check_weights(w).copy()
    w[rig.check_index(i)] = 0.0
    target = rig.check_mesh(target)
    return rig.neutral.coords + rig.deformation(w, kind) - target.coords
