"""
Domain types for histogram-based information estimates.

All entropies are in bits.
"""

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Tuple

import numpy as np
import pandas as pd

from core.exceptions import DegenerateHistogramError, ShapeMismatchError
from core.io_utils import atomic_write_text, read_json, write_json


class BinningStrategy:
    """Histogram edge strategies."""
    EQUAL_WIDTH = 'equal-width'
    EQUAL_OCCUPANCY = 'equal-occupancy'

    CHOICES = (EQUAL_WIDTH, EQUAL_OCCUPANCY)


def _readonly(array, dtype):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class HistogramModel:
    """
    One-dimensional histogram.

    Attributes:
        edges: B + 1 strictly ascending edges
        counts: B non-negative bin counts
        N: Number of samples
        strategy: Edge strategy that produced the edges
    """
    edges: np.ndarray
    counts: np.ndarray
    N: int
    strategy: str

    def __post_init__(self):
        object.__setattr__(self, 'edges', _readonly(self.edges, np.float64))
        object.__setattr__(self, 'counts', _readonly(self.counts, np.int64))
        if len(self.edges) != len(self.counts) + 1:
            raise ShapeMismatchError(f'{len(self.edges)} edges for {len(self.counts)} bins')
        if np.any(np.diff(self.edges) <= 0):
            raise DegenerateHistogramError('Histogram edges must be strictly ascending')
        if int(self.counts.sum()) != self.N:
            raise ShapeMismatchError(f'Bin counts sum to {int(self.counts.sum())}, expected N={self.N}')

    @property
    def B(self) -> int:
        return len(self.counts)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.N

    @property
    def density(self) -> np.ndarray:
        """p(k) = b(k) / (N * width(k)); integrates to one over the edges."""
        return self.counts / (self.N * self.widths)


@dataclass(frozen=True, eq=False)
class JointHistogram:
    """Two-dimensional histogram built on the marginal edges of each axis."""
    counts: np.ndarray
    edges_i: np.ndarray
    edges_j: np.ndarray
    N: int
    strategy: str

    def __post_init__(self):
        object.__setattr__(self, 'counts', _readonly(self.counts, np.int64))
        object.__setattr__(self, 'edges_i', _readonly(self.edges_i, np.float64))
        object.__setattr__(self, 'edges_j', _readonly(self.edges_j, np.float64))
        expected = (len(self.edges_i) - 1, len(self.edges_j) - 1)
        if self.counts.shape != expected:
            raise ShapeMismatchError(f'Joint counts shape {self.counts.shape}, expected {expected}')
        if int(self.counts.sum()) != self.N:
            raise ShapeMismatchError(f'Joint counts sum to {int(self.counts.sum())}, expected N={self.N}')

    @property
    def B(self) -> Tuple[int, int]:
        return self.counts.shape

    def marginal(self, axis: int) -> HistogramModel:
        """Marginal histogram along axis 0 (signal i) or 1 (signal j)."""
        counts = self.counts.sum(axis=1 - axis)
        edges = self.edges_i if axis == 0 else self.edges_j
        return HistogramModel(edges=edges, counts=counts, N=self.N, strategy=self.strategy)


@dataclass(frozen=True)
class EntropyEstimate:
    """
    Attributes:
        h: Differential entropy estimate (bits)
        H_discrete: Entropy of the bin probabilities (bits)
        variance: Asymptotic variance of H_discrete
        B: Bins used
    """
    h: float
    H_discrete: float
    variance: float
    B: int

    def to_dict(self) -> dict:
        return {'h': self.h, 'H_discrete': self.H_discrete, 'variance': self.variance, 'B': self.B}


@dataclass(frozen=True, eq=False)
class PMIMatrix:
    """
    Pairwise mutual information (bits) with a zero diagonal.

    Attributes:
        M: n x n symmetric non-negative matrix
        B: Requested bin count
        strategy: Edge strategy
        labels: Row labels (channels or components)
    """
    M: np.ndarray
    B: int
    strategy: str
    labels: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, 'M', _readonly(self.M, np.float64))
        n = self.M.shape[0]
        if self.M.shape != (n, n):
            raise ShapeMismatchError(f'PMI matrix must be square, got {self.M.shape}')
        if not self.labels:
            object.__setattr__(self, 'labels', tuple(str(i) for i in range(n)))
        object.__setattr__(self, 'labels', tuple(self.labels))

    @property
    def n(self) -> int:
        return self.M.shape[0]

    def mean(self) -> float:
        """Mean over all n^2 elements, zero diagonal included."""
        return float(self.M.mean())

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.M, index=list(self.labels), columns=list(self.labels))

    def to_csv(self, path) -> Path:
        buffer = io.StringIO()
        pd.DataFrame(self.M, columns=list(self.labels)).to_csv(buffer, index=False, float_format='%.17g')
        atomic_write_text(path, buffer.getvalue())
        return Path(path)

    def to_dict(self) -> dict:
        return {'B': self.B, 'strategy': self.strategy, 'labels': list(self.labels),
                'matrix': self.M.tolist()}

    def to_json(self, path) -> Path:
        write_json(path, self.to_dict())
        return Path(path)

    @classmethod
    def from_json(cls, path) -> 'PMIMatrix':
        payload = read_json(path)
        return cls(M=np.array(payload['matrix']), B=int(payload['B']), strategy=payload['strategy'],
                   labels=tuple(payload.get('labels', ())))
