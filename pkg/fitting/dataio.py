"""Rig and animation files.

The primary format is text: one ``#`` header line holding a JSON object,
followed by one row of numbers per vector written with 17 significant digits,
which round-trips every double exactly. A path ending in ``.npz`` selects the
packed binary sidecar with the same header and rows.

Rig rows: the neutral, then the m blendshapes, then one row per corrective
term in header order. Animation rows: one per frame, either m weights or 3n
coordinates.
"""
import json
import logging
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import NoisyReferenceError, RigDimensionError, RigFileError
from .rig import BlendshapeRig, CorrectiveTerm, Mesh

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
RIG_FORMAT = 'rigfit-rig'
ANIMATION_FORMAT = 'rigfit-animation'
WEIGHTS = 'weights'
MESH = 'mesh'
NOISE_MODEL = 'gaussian, sigma2 is the per-coordinate variance'


def _write(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(header, sort_keys=True)
    if path.suffix == '.npz':
        with path.open('wb') as handle:
            np.savez(handle, header=np.array(text), rows=rows)
    else:
        np.savetxt(path, rows, fmt='%.17g', header=text, comments='# ')
    logger.debug('wrote %s (%d rows)', path, len(rows))
    return path


def _read(path, expected_format):
    path = Path(path)
    if not path.exists():
        raise RigFileError(f'{path} does not exist')
    try:
        if path.suffix == '.npz':
            with np.load(path) as data:
                header = json.loads(str(data['header']))
                rows = np.array(data['rows'], dtype=float)
        else:
            with path.open() as handle:
                first = handle.readline()
            if not first.startswith('# '):
                raise RigFileError(f'{path} has no header line')
            header = json.loads(first[2:])
            with warnings.catch_warnings():
                warnings.simplefilter('ignore', UserWarning)
                rows = np.loadtxt(path, dtype=float, comments='#', ndmin=2)
    except (json.JSONDecodeError, ValueError, KeyError) as exc:
        if isinstance(exc, RigFileError):
            raise
        raise RigFileError(f'cannot parse {path}: {exc}') from exc
    if header.get('format') != expected_format:
        raise RigFileError(f'{path} is not a {expected_format} file')
    if header.get('format_version') != FORMAT_VERSION:
        raise RigFileError(f'{path} has unsupported format_version {header.get("format_version")}')
    return header, rows


def save_rig(rig, path):
    header = {
        'format': RIG_FORMAT,
        'format_version': FORMAT_VERSION,
        'm': rig.m,
        'n': rig.n,
        'units': 'cm',
        'corrections': [list(term.indices) for term in rig.corrections],
    }
    rows = np.vstack([rig.neutral.coords[None, :], rig.basis.T] + [t.offset[None, :] for t in rig.corrections])
    return _write(path, header, rows)


def load_rig(path):
    header, rows = _read(path, RIG_FORMAT)
    m, n = int(header['m']), int(header['n'])
    corrections = header.get('corrections', [])
    if rows.shape != (1 + m + len(corrections), 3 * n):
        raise RigFileError(f'{path}: expected {1 + m + len(corrections)} rows of {3 * n} numbers, got {rows.shape}')
    terms = [CorrectiveTerm(tuple(idx), rows[1 + m + k]) for k, idx in enumerate(corrections)]
    return BlendshapeRig(rows[0], rows[1:1 + m].T, terms)


@dataclass
class Animation:
    """A sequence of weight vectors or meshes, all of one kind and length."""

    kind: str
    frames: np.ndarray
    noisy: bool = False
    sigma2: float = 0.0
    seed: int = None

    def __post_init__(self):
        if self.kind not in (WEIGHTS, MESH):
            raise RigFileError(f'unknown animation kind {self.kind!r}')
        self.frames = np.atleast_2d(np.asarray(self.frames, dtype=float))

    @property
    def frame_count(self):
        return self.frames.shape[0]

    @property
    def width(self):
        return self.frames.shape[1]

    def meshes(self):
        if self.kind != MESH:
            raise RigFileError('weight animations hold no meshes')
        return [Mesh(row) for row in self.frames]

    def check_against(self, rig):
        expected = rig.m if self.kind == WEIGHTS else 3 * rig.n
        if self.frame_count and self.width != expected:
            raise RigDimensionError(
                f'{self.kind} animation rows have {self.width} values, rig expects {expected}')
        return self

    def require_clean(self):
        if self.noisy:
            raise NoisyReferenceError('evaluation needs the clean sequence, this one is flagged noisy')
        return self


def save_animation(animation, path):
    header = {
        'format': ANIMATION_FORMAT,
        'format_version': FORMAT_VERSION,
        'kind': animation.kind,
        'frame_count': animation.frame_count,
        'width': animation.width,
        'noisy': bool(animation.noisy),
        'sigma2': float(animation.sigma2),
        'seed': animation.seed,
        'noise_model': NOISE_MODEL,
    }
    return _write(path, header, animation.frames)


def load_animation(path, kind=None):
    header, rows = _read(path, ANIMATION_FORMAT)
    if kind is not None and header['kind'] != kind:
        raise RigFileError(f'{path} holds {header["kind"]} frames, expected {kind}')
    rows = rows.reshape(int(header['frame_count']), int(header['width']))
    return Animation(
        kind=header['kind'],
        frames=rows,
        noisy=bool(header.get('noisy', False)),
        sigma2=float(header.get('sigma2', 0.0)),
        seed=header.get('seed'),
    )
