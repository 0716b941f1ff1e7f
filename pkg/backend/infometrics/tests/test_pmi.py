"""
Tests for pairwise mutual information

@TEST:INFO-PMI
"""

import math

import numpy as np
import pytest


@pytest.mark.unit
class TestPmi:
    """pmi against closed forms and the surrogate floor."""

    def test_self_information(self, rng):
        """
        @TEST:INFO-PMI-001
        pmi(x, x) = H(x)
        """
        from infometrics.services.entropy import discrete_entropy
        from infometrics.services.histogram import build_histogram
        from infometrics.services.pmi import pmi

        x = rng.laplace(size=4000)
        hist = build_histogram(x, 32)
        assert pmi(x, x, 32) == pytest.approx(discrete_entropy(hist.counts, hist.N), abs=1e-12)

    def test_correlated_gaussians(self, rng):
        """
        @TEST:INFO-PMI-002
        Bivariate Gaussian with rho = 0.9 carries -1/2 log2(1 - rho^2) bits
        """
        from infometrics.services.pmi import pmi

        rho = 0.9
        cov = [[1.0, rho], [rho, 1.0]]
        x = rng.multivariate_normal([0.0, 0.0], cov, size=200000).T
        assert abs(pmi(x[0], x[1], 64) - (-0.5 * math.log2(1 - rho ** 2))) < 0.05

    def test_independent_below_surrogate_floor(self, rng):
        """
        @TEST:INFO-PMI-003
        A permuted copy stays below mean + 3 std of permutation surrogates
        """
        from infometrics.services.pmi import pmi, surrogate_threshold

        x = rng.laplace(size=20000)
        y = rng.permutation(x)
        floor = surrogate_threshold(x, y, 16, 'equal-width', n_surrogates=100, seed=3)
        assert pmi(x, y, 16) < floor

    def test_non_negative(self, rng):
        """
        @TEST:INFO-PMI-004
        Estimates are clamped at zero
        """
        from infometrics.services.pmi import pmi

        assert pmi(rng.uniform(size=50), rng.uniform(size=50), 4) >= 0.0

    def test_length_mismatch(self):
        """
        @TEST:INFO-PMI-005
        Signals of different length are rejected
        """
        from core.exceptions import DegenerateHistogramError
        from infometrics.services.pmi import pmi

        with pytest.raises(DegenerateHistogramError):
            pmi(np.arange(10.0), np.arange(11.0), 2)


@pytest.mark.unit
class TestPmiMatrix:
    """Symmetric matrices of pairwise PMI."""

    def test_identical_rows(self, rng):
        """
        @TEST:INFO-PMI-006
        Two identical rows: off-diagonal H_1, zero diagonal
        """
        from infometrics.services.entropy import discrete_entropy
        from infometrics.services.histogram import build_histogram
        from infometrics.services.pmi import pmi_matrix

        x = rng.standard_normal(2000)
        matrix = pmi_matrix(np.vstack([x, x]), 16)
        hist = build_histogram(x, 16)
        assert matrix.M[0, 1] == matrix.M[1, 0]
        assert matrix.M[0, 1] == pytest.approx(discrete_entropy(hist.counts, hist.N), abs=1e-12)
        assert np.all(np.diag(matrix.M) == 0.0)

    def test_rank_invariance_with_equal_occupancy(self, rng):
        """
        @TEST:INFO-PMI-007
        Strictly increasing per-row transforms leave the matrix unchanged
        """
        from infometrics.services.pmi import pmi_matrix

        data = rng.standard_normal((3, 3000))
        data[1] += 0.5 * data[0]
        transformed = np.vstack([np.exp(data[0]), data[1] ** 3, 2.0 * data[2] + 7.0])
        before = pmi_matrix(data, 16, 'equal-occupancy')
        after = pmi_matrix(transformed, 16, 'equal-occupancy')
        np.testing.assert_allclose(after.M, before.M, atol=1e-9)

    def test_threads_give_identical_matrix(self, rng):
        """
        @TEST:INFO-PMI-008
        Pair-parallel evaluation writes the same values
        """
        from infometrics.services.pmi import pmi_matrix

        data = rng.laplace(size=(5, 2000))
        np.testing.assert_array_equal(pmi_matrix(data, 16, threads=4).M, pmi_matrix(data, 16).M)

    def test_degenerate_row_is_named(self):
        """
        @TEST:INFO-PMI-009
        A constant row under equal-occupancy names the row
        """
        from core.exceptions import DegenerateHistogramError
        from infometrics.services.pmi import pmi_matrix

        data = np.vstack([np.arange(100.0), np.zeros(100)])
        with pytest.raises(DegenerateHistogramError) as exc:
            pmi_matrix(data, 8, 'equal-occupancy')
        assert exc.value.context['row'] == 1

    def test_json_round_trip(self, tmp_path, rng):
        """
        @TEST:INFO-PMI-010
        to_json / from_json keep labels and values
        """
        from infometrics.domain import PMIMatrix
        from infometrics.services.pmi import pmi_matrix

        matrix = pmi_matrix(rng.laplace(size=(3, 500)), 8, labels=('a', 'b', 'c'))
        loaded = PMIMatrix.from_json(matrix.to_json(tmp_path / 'pmi.json'))
        assert loaded.labels == ('a', 'b', 'c')
        np.testing.assert_array_equal(loaded.M, matrix.M)
