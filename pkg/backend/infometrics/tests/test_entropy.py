"""
Tests for histograms and plug-in entropies

@TEST:INFO-ENTROPY
"""

import math

import numpy as np
import pytest


@pytest.mark.unit
class TestHistogram:
    """Edge strategies and bin counts."""

    def test_equal_width_counts_are_binomial(self, rng):
        """
        @TEST:INFO-ENTROPY-001
        Uniform samples fill equal-width bins evenly
        """
        from infometrics.services.histogram import build_histogram

        hist = build_histogram(rng.uniform(0.0, 1.0, 1000), 10, 'equal-width')
        sigma = math.sqrt(100 * 0.9)
        assert hist.counts.sum() == 1000
        assert np.all(np.abs(hist.counts - 100) < 4 * sigma)

    def test_equal_occupancy_counts(self, rng):
        """
        @TEST:INFO-ENTROPY-002
        Without ties each bin holds floor or ceil of N/B samples
        """
        from infometrics.services.histogram import build_histogram

        N = 1001
        hist = build_histogram(rng.standard_normal(N), 4, 'equal-occupancy')
        assert hist.B == 4
        assert set(hist.counts.tolist()) <= {N // 4, -(-N // 4)}

    def test_equal_occupancy_merges_ties(self):
        """
        @TEST:INFO-ENTROPY-003
        Tied quantiles merge edges, leaving fewer bins
        """
        from infometrics.services.histogram import build_histogram

        x = np.array([0.0] * 50 + [1.0] * 50)
        hist = build_histogram(x, 10, 'equal-occupancy')
        assert hist.B < 10
        assert hist.counts.sum() == 100

    def test_constant_signal_equal_width(self):
        """
        @TEST:INFO-ENTROPY-004
        A constant signal puts all mass in one bin
        """
        from infometrics.services.entropy import discrete_entropy, entropy_variance
        from infometrics.services.histogram import build_histogram

        hist = build_histogram(np.full(100, 3.0), 8, 'equal-width')
        assert np.count_nonzero(hist.counts) == 1
        assert discrete_entropy(hist.counts, hist.N) == 0.0
        assert entropy_variance(hist) == 0.0

    def test_constant_signal_equal_occupancy(self):
        """
        @TEST:INFO-ENTROPY-005
        Equal-occupancy edges collapse for a constant signal
        """
        from core.exceptions import DegenerateHistogramError
        from infometrics.services.histogram import build_histogram

        with pytest.raises(DegenerateHistogramError):
            build_histogram(np.zeros(100), 8, 'equal-occupancy')

    def test_too_few_samples(self):
        """
        @TEST:INFO-ENTROPY-006
        B larger than N is rejected
        """
        from core.exceptions import DegenerateHistogramError
        from infometrics.services.histogram import build_histogram

        with pytest.raises(DegenerateHistogramError):
            build_histogram(np.arange(5.0), 10)


@pytest.mark.unit
class TestMarginalEntropy:
    """Differential entropy against closed forms."""

    def test_uniform_unit_interval(self, rng):
        """
        @TEST:INFO-ENTROPY-007
        h(U[0,1)) = 0 bits
        """
        from infometrics.services.entropy import signal_entropy

        assert abs(signal_entropy(rng.uniform(0, 1, 200000), 100).h) < 0.02

    def test_uniform_scaling(self, rng):
        """
        @TEST:INFO-ENTROPY-008
        h(U[0,2)) = 1 bit
        """
        from infometrics.services.entropy import signal_entropy

        assert abs(signal_entropy(rng.uniform(0, 2, 200000), 100).h - 1.0) < 0.02

    def test_standard_normal(self, rng):
        """
        @TEST:INFO-ENTROPY-009
        h(N(0,1)) = 1/2 log2(2 pi e)
        """
        from infometrics.services.entropy import signal_entropy

        expected = 0.5 * math.log2(2 * math.pi * math.e)
        assert abs(signal_entropy(rng.standard_normal(200000), 100).h - expected) < 0.02

    def test_equal_occupancy_agrees(self, rng):
        """
        @TEST:INFO-ENTROPY-010
        Both strategies estimate the same Gaussian entropy
        """
        from infometrics.services.entropy import signal_entropy

        x = rng.standard_normal(200000)
        expected = 0.5 * math.log2(2 * math.pi * math.e)
        assert abs(signal_entropy(x, 100, 'equal-occupancy').h - expected) < 0.05


@pytest.mark.unit
class TestEntropyVariance:
    """Asymptotic variance of H_discrete."""

    def test_uniform_counts(self):
        """
        @TEST:INFO-ENTROPY-011
        Exactly uniform counts have zero variance
        """
        from infometrics.domain import HistogramModel
        from infometrics.services.entropy import entropy_variance

        hist = HistogramModel(edges=np.arange(5.0), counts=[25, 25, 25, 25], N=100, strategy='equal-width')
        assert entropy_variance(hist) == pytest.approx(0.0, abs=1e-15)

    def test_matches_bootstrap(self, rng):
        """
        @TEST:INFO-ENTROPY-012
        Laplacian counts: variance agrees with a multinomial bootstrap within a factor 1.5
        """
        from infometrics.services.entropy import discrete_entropy, entropy_variance
        from infometrics.services.histogram import build_histogram

        N = 100000
        hist = build_histogram(rng.laplace(size=N), 64)
        p = hist.counts / N
        boot = [discrete_entropy(rng.multinomial(N, p), N) for _ in range(200)]
        ratio = entropy_variance(hist) / np.var(boot, ddof=1)
        assert 1 / 1.5 < ratio < 1.5


@pytest.mark.unit
class TestJointEntropy:
    """Joint histograms on marginal edges."""

    def test_identical_signals(self, rng):
        """
        @TEST:INFO-ENTROPY-013
        H(x, x) = H(x)
        """
        from infometrics.services.entropy import discrete_entropy, joint_entropy
        from infometrics.services.histogram import build_histogram

        x = rng.standard_normal(5000)
        hist = build_histogram(x, 32)
        assert joint_entropy(x, x, 32) == pytest.approx(discrete_entropy(hist.counts, hist.N), abs=1e-12)

    def test_two_cells(self):
        """
        @TEST:INFO-ENTROPY-014
        Two samples in two distinct cells give 1 bit
        """
        from infometrics.services.entropy import joint_entropy

        assert joint_entropy([0.0, 1.0], [0.0, 1.0], 2) == pytest.approx(1.0, abs=1e-12)

    def test_independent_uniforms(self, rng):
        """
        @TEST:INFO-ENTROPY-015
        H_ij is within 0.01 bits of H_i + H_j for independent signals
        """
        from infometrics.services.entropy import discrete_entropy, joint_entropy
        from infometrics.services.histogram import build_histogram

        x, y = rng.uniform(size=200000), rng.uniform(size=200000)
        hx, hy = build_histogram(x, 10), build_histogram(y, 10)
        total = discrete_entropy(hx.counts, hx.N) + discrete_entropy(hy.counts, hy.N)
        gap = total - joint_entropy(x, y, 10)
        assert 0.0 <= gap <= 0.01

    def test_transpose_symmetry(self, rng):
        """
        @TEST:INFO-ENTROPY-016
        Swapping the signals gives the identical joint entropy
        """
        from infometrics.services.entropy import joint_differential_entropy, joint_entropy

        x, y = rng.standard_normal(3000), rng.laplace(size=3000)
        assert joint_entropy(x, y, 16) == joint_entropy(y, x, 16)
        assert joint_differential_entropy(x, y, 16) == pytest.approx(joint_differential_entropy(y, x, 16),
                                                                     abs=1e-12)
