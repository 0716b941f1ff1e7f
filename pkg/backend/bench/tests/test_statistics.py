"""
Tests for regressions and the rv threshold sweep

@TEST:BENCH-STAT
"""

import math

import numpy as np
import pytest


@pytest.mark.unit
class TestRegress:
    """Ordinary least squares."""

    def test_collinear(self):
        """
        @TEST:BENCH-STAT-001
        """
        from bench.services.statistics import regress

        fit = regress([1.0, 2.0, 3.0, 4.0], [3.0, 5.0, 7.0, 9.0])
        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(1.0)
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.p_value > 0.0
        assert math.isfinite(fit.neg_log10_p)

    def test_matches_normal_equations(self, rng):
        """
        @TEST:BENCH-STAT-002
        """
        from bench.services.statistics import regress

        x = rng.uniform(0, 100, size=20)
        y = 0.3 * x + rng.standard_normal(20)
        X = np.column_stack([x, np.ones_like(x)])
        slope, intercept = np.linalg.solve(X.T @ X, X.T @ y)
        fit = regress(x, y)
        assert fit.slope == pytest.approx(slope, rel=1e-9)
        assert fit.intercept == pytest.approx(intercept, rel=1e-9, abs=1e-9)
        residual = y - (slope * x + intercept)
        r_squared = 1 - residual @ residual / np.sum((y - y.mean()) ** 2)
        assert fit.r_squared == pytest.approx(r_squared, rel=1e-9)
        assert fit.n_points == 20

    @pytest.mark.parametrize('x, y', [
        ([1.0, 2.0], [1.0, 2.0]),
        ([2.0, 2.0, 2.0], [1.0, 2.0, 3.0]),
        ([1.0, float('nan'), 3.0], [1.0, 2.0, 3.0]),
    ])
    def test_degenerate(self, x, y):
        """
        @TEST:BENCH-STAT-003
        """
        from bench.services.statistics import regress
        from core.exceptions import DegenerateRegressorError

        with pytest.raises(DegenerateRegressorError) as exc:
            regress(x, y)
        assert exc.value.code == 'BENCH-002'


@pytest.mark.unit
class TestThresholdSweep:
    """ND% against MIR per threshold."""

    def test_rows_per_threshold(self, toy_report):
        """
        @TEST:BENCH-STAT-004
        More dipolar algorithms reduce more information
        """
        from bench.services.statistics import threshold_sweep

        frame = threshold_sweep(toy_report)
        assert frame['threshold'].tolist() == [0.05, 0.10, 0.20]
        assert not frame['degenerate_mir'].any()
        assert (frame['slope_mir'] > 0).all()
        assert (frame['slope_remnant_pmi'] < 0).all()
        assert frame['r_squared_mir'].between(0, 1).all()

    def test_degenerate_threshold(self, toy_report):
        """
        @TEST:BENCH-STAT-005
        A threshold where every algorithm scores 0% cannot be regressed
        """
        from bench.services.statistics import threshold_sweep

        frame = threshold_sweep(toy_report, thresholds=[0.001, 0.10])
        assert frame['degenerate_mir'].tolist() == [True, False]
        assert math.isnan(frame['slope_mir'][0])

    def test_algorithm_means(self, toy_report):
        """
        @TEST:BENCH-STAT-006
        """
        from bench.services.statistics import algorithm_means

        means = algorithm_means(toy_report, 'nd_percent', threshold=0.05)
        assert means['picard']['mean'] == pytest.approx(50.0)
        assert means['fastica']['mean'] == pytest.approx(25.0)
        assert means['pca']['mean'] == 0.0
        assert algorithm_means(toy_report, 'mir')['fastica']['mean'] == pytest.approx(1.85)

    def test_missing_dipolarity(self, toy_report):
        """
        @TEST:BENCH-STAT-007
        """
        import dataclasses

        from bench.services.statistics import threshold_sweep
        from core.exceptions import MissingMetricError

        cells = tuple({k: v for k, v in cell.items() if k != 'dipolarity'} for cell in toy_report.cells)
        with pytest.raises(MissingMetricError) as exc:
            threshold_sweep(dataclasses.replace(toy_report, cells=cells))
        assert exc.value.context['metric'] == 'dipolarity'
