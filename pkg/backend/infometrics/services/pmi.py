"""
Pairwise mutual information.

pmi = H_i + H_j - H_ij on shared per-axis edges; bin widths cancel, so the
discrete entropies give the same value as the differential plug-ins.

@CODE:INFO-PMI
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from core.conf import icabench_settings
from core.exceptions import DegenerateHistogramError
from infometrics.domain import PMIMatrix
from infometrics.services.entropy import discrete_entropy
from infometrics.services.histogram import assign_bins, bin_edges, joint_counts

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class _BinnedSignal:
    """Bin indices and marginal entropy of one signal, computed once."""
    idx: np.ndarray
    B: int
    H: float

    @classmethod
    def from_samples(cls, x, B, strategy):
        edges = bin_edges(x, B, strategy)
        idx = assign_bins(np.asarray(x, dtype=np.float64).ravel(), edges)
        B = len(edges) - 1
        return cls(idx=idx, B=B, H=discrete_entropy(np.bincount(idx, minlength=B), len(idx)))

    @property
    def N(self):
        return len(self.idx)

    def permuted(self, order):
        return replace(self, idx=self.idx[order])


def _pair_value(a: _BinnedSignal, b: _BinnedSignal) -> float:
    H_ij = discrete_entropy(joint_counts(a.idx, b.idx, a.B, b.B), a.N)
    return max(a.H + b.H - H_ij, 0.0)


def pmi(x_i, x_j, B: int = None, strategy: str = None) -> float:
    """
    Mutual information of two signals in bits, clamped at zero.

    Args:
        x_i, x_j: Equal-length sample vectors
        B: Bins per axis (settings default when None)
        strategy: Edge strategy (settings default when None)
    """
    B = int(B or icabench_settings.DEFAULT_BINS)
    strategy = strategy or icabench_settings.DEFAULT_BINNING
    if np.size(x_i) != np.size(x_j):
        raise DegenerateHistogramError(f'Signals differ in length ({np.size(x_i)} vs {np.size(x_j)})')
    return _pair_value(_BinnedSignal.from_samples(x_i, B, strategy),
                       _BinnedSignal.from_samples(x_j, B, strategy))


def _rows(data):
    if hasattr(data, 'data') and hasattr(data, 'labels'):
        return np.asarray(data.data), tuple(data.labels)
    rows = np.asarray(data, dtype=np.float64)
    return rows, tuple(str(i) for i in range(rows.shape[0]))


def pmi_matrix(data, B: int = None, strategy: str = None, threads: int = 1, labels=None) -> PMIMatrix:
    """
    PMI of every unordered row pair; diagonal set to zero.

    Args:
        data: Dataset or n x N matrix (channels or component activations)
        B: Bins per axis
        strategy: Edge strategy
        threads: Workers for the pair evaluation; each entry is written once
        labels: Optional row labels

    Raises:
        DegenerateHistogramError: Names the offending row
    """
    B = int(B or icabench_settings.DEFAULT_BINS)
    strategy = strategy or icabench_settings.DEFAULT_BINNING
    rows, default_labels = _rows(data)
    labels = tuple(labels) if labels is not None else default_labels
    n = rows.shape[0]
    if n < 2:
        raise DegenerateHistogramError(f'PMI matrix needs at least 2 rows, got {n}')

    binned = []
    for i in range(n):
        try:
            binned.append(_BinnedSignal.from_samples(rows[i], B, strategy))
        except DegenerateHistogramError as e:
            raise DegenerateHistogramError(f'Row {i} ({labels[i]}): {e.detail}', row=i) from e

    pairs = list(itertools.combinations(range(n), 2))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(lambda ij: _pair_value(binned[ij[0]], binned[ij[1]]), pairs))
    else:
        values = [_pair_value(binned[i], binned[j]) for i, j in pairs]

    M = np.zeros((n, n))
    for (i, j), value in zip(pairs, values):
        M[i, j] = M[j, i] = value
    logger.debug('PMI matrix over %d rows: mean %.4f bits', n, M.mean())
    return PMIMatrix(M=M, B=B, strategy=strategy, labels=labels)


def surrogate_pmi(x_i, x_j, B: int = None, strategy: str = None, n_surrogates: int = None,
                  seed: int = 0) -> np.ndarray:
    """PMI of x_i against random permutations of x_j."""
    B = int(B or icabench_settings.DEFAULT_BINS)
    strategy = strategy or icabench_settings.DEFAULT_BINNING
    n_surrogates = int(n_surrogates or icabench_settings.SURROGATES)
    rng = np.random.default_rng(seed)
    a = _BinnedSignal.from_samples(x_i, B, strategy)
    b = _BinnedSignal.from_samples(x_j, B, strategy)
    values = np.empty(n_surrogates)
    for k in range(n_surrogates):
        values[k] = _pair_value(a, b.permuted(rng.permutation(b.N)))
    return values


def surrogate_threshold(x_i, x_j, B: int = None, strategy: str = None, n_surrogates: int = None,
                        seed: int = 0) -> float:
    """Estimator bias floor: mean + 3 std of the permutation-surrogate PMI."""
    values = surrogate_pmi(x_i, x_j, B, strategy, n_surrogates, seed)
    return float(values.mean() + 3.0 * values.std())

