"""
Plug-in entropy estimators over histograms.

Sums go through math.fsum so that results do not depend on summation order
(a transposed joint histogram gives the identical joint entropy).
"""

import math

import numpy as np

from infometrics.domain import BinningStrategy, EntropyEstimate, HistogramModel, JointHistogram
from infometrics.services.histogram import build_histogram, build_joint_histogram


def discrete_entropy(counts, N: int) -> float:
    """-sum p log2 p over non-empty cells."""
    counts = np.asarray(counts).ravel()
    p = counts[counts > 0] / N
    return -math.fsum(p * np.log2(p))


def entropy_variance(hist: HistogramModel) -> float:
    """
    Asymptotic variance of the discrete entropy estimate.

    (sum p (log2 p)^2 - H^2) / N, clamped at zero.
    """
    p = hist.counts[hist.counts > 0] / hist.N
    log_p = np.log2(p)
    H = -math.fsum(p * log_p)
    return max((math.fsum(p * log_p ** 2) - H * H) / hist.N, 0.0)


def marginal_entropy(hist: HistogramModel) -> EntropyEstimate:
    """
    Differential entropy by Riemann approximation.

    h = H_discrete + sum_k p_k log2(width_k)
    """
    H = discrete_entropy(hist.counts, hist.N)
    nonzero = hist.counts > 0
    p = hist.counts[nonzero] / hist.N
    h = H + math.fsum(p * np.log2(hist.widths[nonzero]))
    return EntropyEstimate(h=h, H_discrete=H, variance=entropy_variance(hist), B=hist.B)


def signal_entropy(x, B: int, strategy: str = BinningStrategy.EQUAL_WIDTH) -> EntropyEstimate:
    return marginal_entropy(build_histogram(x, B, strategy))


def joint_discrete_entropy(joint: JointHistogram) -> float:
    return discrete_entropy(joint.counts, joint.N)


def joint_entropy(x_i, x_j, B: int, strategy: str = BinningStrategy.EQUAL_WIDTH) -> float:
    """Discrete joint entropy H_ij of two signals on their marginal edges."""
    return joint_discrete_entropy(build_joint_histogram(x_i, x_j, B, strategy))


def joint_differential_entropy(x_i, x_j, B: int, strategy: str = BinningStrategy.EQUAL_WIDTH) -> float:
    """h_ij = H_ij + sum_kl p_kl log2(width_k * width_l)."""
    joint = build_joint_histogram(x_i, x_j, B, strategy)
    k, l = np.nonzero(joint.counts)
    p = joint.counts[k, l] / joint.N
    area = np.diff(joint.edges_i)[k] * np.diff(joint.edges_j)[l]
    return joint_discrete_entropy(joint) + math.fsum(p * np.log2(area))
