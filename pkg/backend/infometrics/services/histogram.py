"""
Histogram construction.

Equal-width edges span [min, max]; equal-occupancy edges are sample order
statistics, so bins depend only on ranks. Tied edges are merged, which can
leave fewer than B bins.
"""

import numpy as np

from core.exceptions import DegenerateHistogramError
from infometrics.domain import BinningStrategy, HistogramModel, JointHistogram


def _as_samples(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).ravel()
    if not np.all(np.isfinite(x)):
        raise DegenerateHistogramError('Histogram input contains non-finite values')
    return x


def bin_edges(x, B: int, strategy: str = BinningStrategy.EQUAL_WIDTH) -> np.ndarray:
    """
    Compute histogram edges for one signal.

    Args:
        x: Samples
        B: Requested bin count (>= 2, <= len(x))
        strategy: 'equal-width' or 'equal-occupancy'

    Returns:
        Strictly ascending edges

    Raises:
        DegenerateHistogramError: Constant signal under equal-occupancy,
            or B out of range
    """
    x = _as_samples(x)
    B = int(B)
    if B < 2:
        raise DegenerateHistogramError(f'Bin count must be >= 2, got {B}')
    if len(x) < B:
        raise DegenerateHistogramError(f'Need at least {B} samples for {B} bins, got {len(x)}')

    if strategy == BinningStrategy.EQUAL_WIDTH:
        lo, hi = float(x.min()), float(x.max())
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        return np.linspace(lo, hi, B + 1)

    if strategy == BinningStrategy.EQUAL_OCCUPANCY:
        ordered = np.sort(x, kind='stable')
        N = len(ordered)
        idx = (np.arange(B) * N) // B
        edges = np.unique(np.append(ordered[idx], ordered[-1]))
        if len(edges) < 2:
            raise DegenerateHistogramError('Equal-occupancy edges collapse for a constant signal')
        return edges

    raise DegenerateHistogramError(
        f'Unknown binning strategy {strategy!r}; expected one of {BinningStrategy.CHOICES}')


def assign_bins(x, edges: np.ndarray) -> np.ndarray:
    """Bin index per sample; the extreme samples land in the first and last bins."""
    idx = np.searchsorted(edges, x, side='right') - 1
    return np.clip(idx, 0, len(edges) - 2)


def build_histogram(x, B: int, strategy: str = BinningStrategy.EQUAL_WIDTH) -> HistogramModel:
    x = _as_samples(x)
    edges = bin_edges(x, B, strategy)
    counts = np.bincount(assign_bins(x, edges), minlength=len(edges) - 1)
    return HistogramModel(edges=edges, counts=counts, N=len(x), strategy=strategy)


def joint_counts(idx_i: np.ndarray, idx_j: np.ndarray, B_i: int, B_j: int) -> np.ndarray:
    return np.bincount(idx_i * B_j + idx_j, minlength=B_i * B_j).reshape(B_i, B_j)


def build_joint_histogram(x_i, x_j, B: int, strategy: str = BinningStrategy.EQUAL_WIDTH) -> JointHistogram:
    """Joint histogram using each signal's own marginal edges."""
    x_i, x_j = _as_samples(x_i), _as_samples(x_j)
    if len(x_i) != len(x_j):
        raise DegenerateHistogramError(f'Signals differ in length ({len(x_i)} vs {len(x_j)})')
    edges_i, edges_j = bin_edges(x_i, B, strategy), bin_edges(x_j, B, strategy)
    counts = joint_counts(assign_bins(x_i, edges_i), assign_bins(x_j, edges_j),
                          len(edges_i) - 1, len(edges_j) - 1)
    return JointHistogram(counts=counts, edges_i=edges_i, edges_j=edges_j, N=len(x_i), strategy=strategy)
