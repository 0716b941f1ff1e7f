"""
Domain types for multichannel time series.

Types:
- Dataset: channels x samples matrix with sampling rate and labels
- SynthSpec: recipe for a deterministic synthetic mixture
- GroundTruth: the mixing matrix and sources behind a synthetic Dataset
"""

import hashlib
from dataclasses import dataclass, field, asdict
from typing import Optional, Tuple

import numpy as np

from core.exceptions import InvalidSpecError

SOURCE_KINDS = ('laplacian', 'uniform', 'gaussian', 'logistic', 'bimodal')
MIXING_KINDS = ('random-orthogonal', 'random-general', 'explicit', 'dipolar')


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Multichannel recording.

    Attributes:
        data: n_channels x n_samples float64 matrix (read-only)
        srate: Sampling rate in Hz
        labels: Unique channel names
        id: Dataset identifier
    """
    data: np.ndarray
    srate: float
    labels: Tuple[str, ...]
    id: str

    def __post_init__(self):
        data = _frozen(self.data)
        object.__setattr__(self, 'data', data)
        object.__setattr__(self, 'labels', tuple(str(label) for label in self.labels))
        object.__setattr__(self, 'srate', float(self.srate))

        if data.ndim != 2:
            raise InvalidSpecError(f'Dataset data must be 2-D, got {data.ndim}-D', dataset=self.id)
        n, N = data.shape
        if n < 2:
            raise InvalidSpecError(f'Dataset needs at least 2 channels, got {n}', dataset=self.id)
        if N < n:
            raise InvalidSpecError(
                f'Dataset needs at least as many samples as channels ({N} < {n})', dataset=self.id)
        if not np.all(np.isfinite(data)):
            ch, t = np.argwhere(~np.isfinite(data))[0]
            raise InvalidSpecError(
                f'Non-finite value at channel {ch}, sample {t}', dataset=self.id,
                channel=int(ch), sample=int(t))
        if not self.srate > 0:
            raise InvalidSpecError(f'srate must be positive, got {self.srate}', dataset=self.id)
        if len(self.labels) != n:
            raise InvalidSpecError(
                f'{len(self.labels)} labels for {n} channels', dataset=self.id)
        if len(set(self.labels)) != n:
            raise InvalidSpecError('Channel labels must be unique', dataset=self.id)

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    def centered(self) -> np.ndarray:
        """Return the data with each channel's mean removed."""
        return self.data - self.data.mean(axis=1, keepdims=True)

    def digest(self) -> str:
        """sha256 over the little-endian payload, srate and labels."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.data, dtype='<f8').tobytes())
        h.update(repr((self.srate, self.labels)).encode('utf-8'))
        return h.hexdigest()

    def with_data(self, data, id=None) -> 'Dataset':
        return Dataset(data=data, srate=self.srate, labels=self.labels, id=id or self.id)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.id == other.id and self.srate == other.srate
                and self.labels == other.labels
                and self.data.shape == other.data.shape
                and np.array_equal(self.data, other.data))

    __hash__ = None


@dataclass(frozen=True)
class SynthSpec:
    """
    Recipe for a synthetic ground-truth mixture.

    Attributes:
        n_sources: Number of sources (= channels)
        n_samples: Number of samples
        source_kinds: One kind per source, or a single kind used for all
        mixing: 'random-orthogonal' | 'random-general' | 'explicit' | 'dipolar'
        mixing_matrix: Required when mixing == 'explicit'
        noise_db: Signal-to-noise ratio in dB, None for noiseless
        seed: 64-bit seed
        srate: Sampling rate of the generated dataset
        ar_coefficients: Optional AR(1) coefficient per source
        dataset_id: Identifier of the generated dataset
    """
    n_sources: int
    n_samples: int
    source_kinds: Tuple[str, ...] = ('laplacian',)
    mixing: str = 'random-general'
    mixing_matrix: Optional[Tuple[Tuple[float, ...], ...]] = None
    noise_db: Optional[float] = None
    seed: int = 0
    srate: float = 250.0
    ar_coefficients: Optional[Tuple[float, ...]] = None
    dataset_id: str = ''

    def __post_init__(self):
        kinds = tuple(self.source_kinds)
        if len(kinds) == 1 and self.n_sources > 1:
            kinds = kinds * self.n_sources
        object.__setattr__(self, 'source_kinds', kinds)
        if self.mixing_matrix is not None:
            object.__setattr__(self, 'mixing_matrix',
                               tuple(tuple(float(v) for v in row) for row in self.mixing_matrix))
        if self.ar_coefficients is not None:
            object.__setattr__(self, 'ar_coefficients',
                               tuple(float(v) for v in self.ar_coefficients))
        if not self.dataset_id:
            object.__setattr__(self, 'dataset_id', f'synth-{self.n_sources}x{self.n_samples}-s{self.seed}')
        self.validate()

    def validate(self):
        if self.n_sources < 2:
            raise InvalidSpecError(f'n_sources must be >= 2, got {self.n_sources}')
        if self.n_samples < self.n_sources:
            raise InvalidSpecError(
                f'n_samples ({self.n_samples}) must be >= n_sources ({self.n_sources})')
        if len(self.source_kinds) != self.n_sources:
            raise InvalidSpecError(
                f'{len(self.source_kinds)} source kinds for {self.n_sources} sources')
        unknown = sorted(set(self.source_kinds) - set(SOURCE_KINDS))
        if unknown:
            raise InvalidSpecError(f'Unknown source kinds: {unknown}')
        if self.mixing not in MIXING_KINDS:
            raise InvalidSpecError(f'Unknown mixing kind: {self.mixing!r}')
        if self.mixing == 'explicit':
            if self.mixing_matrix is None:
                raise InvalidSpecError('Explicit mixing requires mixing_matrix')
            shape = np.shape(self.mixing_matrix)
            if shape != (self.n_sources, self.n_sources):
                raise InvalidSpecError(
                    f'mixing_matrix must be {self.n_sources}x{self.n_sources}, got {shape}')
        if self.ar_coefficients is not None:
            if len(self.ar_coefficients) != self.n_sources:
                raise InvalidSpecError('ar_coefficients needs one value per source')
            if any(abs(a) >= 1 for a in self.ar_coefficients):
                raise InvalidSpecError('AR(1) coefficients must lie in (-1, 1)')
        if not self.srate > 0:
            raise InvalidSpecError(f'srate must be positive, got {self.srate}')
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidSpecError('seed must be a 64-bit unsigned integer')

    @property
    def identifiable(self) -> bool:
        """At most one Gaussian source (classical ICA identifiability)."""
        return self.source_kinds.count('gaussian') <= 1

    @classmethod
    def from_dict(cls, data: dict) -> 'SynthSpec':
        data = dict(data)
        if 'source_kinds' in data and isinstance(data['source_kinds'], str):
            data['source_kinds'] = (data['source_kinds'],)
        known = set(cls.__dataclass_fields__)
        extra = sorted(set(data) - known)
        if extra:
            raise InvalidSpecError(f'Unknown SynthSpec fields: {extra}')
        try:
            return cls(**data)
        except TypeError as e:
            raise InvalidSpecError(f'Invalid SynthSpec: {e}') from e

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """
    Generating process of a synthetic Dataset.

    Attributes:
        mixing_matrix: n x n invertible matrix A_true
        sources: n x N standardized sources
        dipoles: Generating dipoles when mixing == 'dipolar'
    """
    mixing_matrix: np.ndarray
    sources: np.ndarray
    dipoles: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, 'mixing_matrix', _frozen(self.mixing_matrix))
        object.__setattr__(self, 'sources', _frozen(self.sources))
        if not np.isfinite(np.linalg.cond(self.mixing_matrix)):
            raise InvalidSpecError('Ground-truth mixing matrix is singular')

    @property
    def unmixing_matrix(self) -> np.ndarray:
        return np.linalg.inv(self.mixing_matrix)
