"""
Mutual Information Reduction and remnant PMI.

MIR = log2|det W| + sum_i h(x_i) - sum_i h(y_i), using only one-dimensional
density estimates. Channel-side quantities are cached per dataset so every
algorithm is scored against bit-identical channel entropies.

@CODE:MIR-001
"""

import logging
import math
import threading

import numpy as np

from core.conf import icabench_settings
from core.exceptions import DegenerateHistogramError, ShapeMismatchError, SingularMatrixError
from infometrics.services.entropy import signal_entropy
from infometrics.services.pmi import pmi_matrix
from mir.domain import MIRReport, RemnantPMI

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


class ChannelEntropyCache:
    """
    Per-dataset channel entropies and channel PMI matrices.

    Keyed by (dataset digest, B, strategy). Safe to share between threads.
    """

    def __init__(self):
        self._entropies = {}
        self._pmi = {}
        self._lock = threading.Lock()
        self.hits = 0

    def _key(self, dataset, B, strategy):
        return dataset.digest(), int(B), strategy

    def channel_entropies(self, dataset, B, strategy):
        """Tuple of h(x_i) in bits for the centered channels."""
        key = self._key(dataset, B, strategy)
        with self._lock:
            if key in self._entropies:
                self.hits += 1
                return self._entropies[key]
        x = dataset.centered()
        values = []
        for i in range(x.shape[0]):
            try:
                values.append(signal_entropy(x[i], B, strategy).h)
            except DegenerateHistogramError as e:
                raise DegenerateHistogramError(
                    f'Channel {i} ({dataset.labels[i]}): {e.detail}', channel=i) from e
        with self._lock:
            return self._entropies.setdefault(key, tuple(values))

    def channel_pmi(self, dataset, B, strategy, threads=1):
        key = self._key(dataset, B, strategy)
        with self._lock:
            if key in self._pmi:
                self.hits += 1
                return self._pmi[key]
        matrix = pmi_matrix(dataset.centered(), B, strategy, threads=threads, labels=dataset.labels)
        with self._lock:
            return self._pmi.setdefault(key, matrix)

    def clear(self):
        with self._lock:
            self._entropies.clear()
            self._pmi.clear()


default_cache = ChannelEntropyCache()


def _canonical_rows(W: np.ndarray) -> np.ndarray:
    """Rows in lexicographic order; results become invariant to row permutation."""
    return W[np.lexsort(W.T[::-1])]


def _validated_unmixing(dataset, W) -> np.ndarray:
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2 or W.shape[1] != dataset.n_channels or W.shape[0] > W.shape[1]:
        raise ShapeMismatchError(
            f'Unmixing matrix shape {W.shape} does not fit {dataset.n_channels} channels',
            expected=dataset.n_channels)
    if not np.all(np.isfinite(W)):
        raise SingularMatrixError('Unmixing matrix contains non-finite values')
    return W


def log2_abs_det(W: np.ndarray) -> float:
    """log2|det W|, or 1/2 log2 det(W W^T) for a k x n matrix with k < n."""
    target = W if W.shape[0] == W.shape[1] else W @ W.T
    sign, logdet = np.linalg.slogdet(target)
    if sign == 0 or not np.isfinite(logdet):
        raise SingularMatrixError(f'Unmixing matrix of shape {W.shape} is singular')
    return logdet / LN2 if W.shape[0] == W.shape[1] else 0.5 * logdet / LN2


def component_entropies(y: np.ndarray, B: int, strategy: str):
    values = []
    for i in range(y.shape[0]):
        try:
            values.append(signal_entropy(y[i], B, strategy).h)
        except DegenerateHistogramError as e:
            raise DegenerateHistogramError(f'Component {i}: {e.detail}', component=i) from e
    return values


def mir(dataset, W, B: int = None, strategy: str = None, cache: ChannelEntropyCache = None,
        algorithm_id: str = '') -> MIRReport:
    """
    Mutual information reduction of y = W x in bits per sample.

    Args:
        dataset: Dataset (channel means are removed first)
        W: n x n unmixing matrix, or k x n for rank-reduced decompositions
        B: Bins (settings default when None)
        strategy: Edge strategy (settings default when None)
        cache: Channel entropy cache (module default when None)
        algorithm_id: Recorded in the report

    Returns:
        MIRReport

    Raises:
        SingularMatrixError: |det W| = 0
        DegenerateHistogramError: Names the channel or component
    """
    B = int(B or icabench_settings.DEFAULT_BINS)
    strategy = strategy or icabench_settings.DEFAULT_BINNING
    cache = cache if cache is not None else default_cache
    W = _canonical_rows(_validated_unmixing(dataset, W))

    log_det = log2_abs_det(W)
    sum_h_x = math.fsum(cache.channel_entropies(dataset, B, strategy))
    sum_h_y = math.fsum(component_entropies(W @ dataset.centered(), B, strategy))
    bits = log_det + sum_h_x - sum_h_y

    report = MIRReport(
        mir_bits_per_sample=bits,
        mir_kbits_per_sec=bits * dataset.srate / 1000.0,
        log_det_W=log_det,
        sum_h_x=sum_h_x,
        sum_h_y=sum_h_y,
        B=B,
        strategy=strategy,
        dataset_id=dataset.id,
        algorithm_id=algorithm_id,
        mean_removed=True,
        rank_reduced=W.shape[0] < W.shape[1],
    )
    logger.debug('MIR %s/%s: %.6f bits/sample', dataset.id, algorithm_id, bits)
    return report


def remnant_pmi(dataset, W, B: int = None, strategy: str = None, cache: ChannelEntropyCache = None,
                threads: int = 1) -> RemnantPMI:
    """
    100 * mean(PMI of W x) / mean(PMI of x).

    Raises:
        DegenerateHistogramError: Channel PMI is zero everywhere
    """
    B = int(B or icabench_settings.DEFAULT_BINS)
    strategy = strategy or icabench_settings.DEFAULT_BINNING
    cache = cache if cache is not None else default_cache
    W = _validated_unmixing(dataset, W)

    channel = cache.channel_pmi(dataset, B, strategy, threads=threads).mean()
    if channel <= 0.0:
        raise DegenerateHistogramError('Mean channel PMI is zero; remnant percentage undefined')
    component = pmi_matrix(W @ dataset.centered(), B, strategy, threads=threads).mean()
    return RemnantPMI(
        channel_mean_pmi=channel,
        component_mean_pmi=component,
        percent=100.0 * (component / channel),
        B=B,
        strategy=strategy,
    )
