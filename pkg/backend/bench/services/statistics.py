"""
Regression of per-algorithm metric means and the rv-threshold sweep.
"""

import logging
import math

import numpy as np
import pandas as pd
from scipy import stats

from bench.domain import BenchReport, RegressionResult
from bench.services.summary import describe, nd_percent
from core.exceptions import DegenerateRegressorError, MissingMetricError

logger = logging.getLogger(__name__)

MIN_POINTS = 3
TINY = np.finfo(np.float64).tiny


def regress(x, y) -> RegressionResult:
    """
    Ordinary least squares of y on x.

    Raises:
        DegenerateRegressorError: Fewer than 3 points, non-finite values or constant x
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DegenerateRegressorError(f'x and y must be 1-D of equal length, got {x.shape} and {y.shape}')
    if x.size < MIN_POINTS:
        raise DegenerateRegressorError(f'Regression needs at least {MIN_POINTS} points, got {x.size}',
                                       n_points=int(x.size))
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DegenerateRegressorError('Regression inputs must be finite')
    if np.all(x == x[0]):
        raise DegenerateRegressorError('Regressor is constant', n_points=int(x.size))

    fit = stats.linregress(x, y)
    r_squared = min(max(float(fit.rvalue) ** 2, 0.0), 1.0)
    p_value = min(max(float(fit.pvalue), TINY), 1.0)
    return RegressionResult(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=r_squared,
        p_value=p_value,
        n_points=int(x.size),
    )


def algorithm_means(report: BenchReport, metric: str, threshold: float = None) -> dict:
    """
    Cross-dataset mean of a metric per algorithm, over successful cells.

    metric is one of 'mir', 'remnant_pmi', 'nd_percent' (needs threshold).
    """
    source = 'dipolarity' if metric == 'nd_percent' else metric
    report.require(source, f'{metric} means')
    extract = {
        'mir': lambda c: c['mir']['mir_bits_per_sample'],
        'remnant_pmi': lambda c: c['remnant_pmi']['percent'],
        'nd_percent': lambda c: nd_percent(c['dipolarity'], threshold),
    }[metric]
    means = {}
    for label in report.algorithms:
        values = [extract(cell) for cell in report.cells
                  if cell['algorithm'] == label and cell['success'] and source in cell]
        if values:
            means[label] = describe(values)
    return means


def _paired(x_means, y_means):
    labels = [label for label in x_means if label in y_means]
    return (labels,
            [x_means[label]['mean'] for label in labels],
            [y_means[label]['mean'] for label in labels])


def threshold_sweep(report: BenchReport, thresholds=None) -> pd.DataFrame:
    """
    Regress ND%(t) against MIR (and remnant PMI when present) for each rv threshold t.

    Significance is the OLS slope p-value, reported as -log10(p).

    Returns:
        One row per threshold, in the order given; degenerate regressions are
        flagged and carry NaN statistics.

    Raises:
        MissingMetricError: No dipolarity (or MIR) in the report
    """
    report.require('dipolarity', 'threshold_sweep')
    report.require('mir', 'threshold_sweep')
    thresholds = list(report.provenance.get('nd_thresholds', ()) if thresholds is None else thresholds)
    targets = {'mir': algorithm_means(report, 'mir')}
    try:
        targets['remnant_pmi'] = algorithm_means(report, 'remnant_pmi')
    except MissingMetricError:
        pass

    rows = []
    for t in thresholds:
        nd = algorithm_means(report, 'nd_percent', threshold=t)
        row = {'threshold': t}
        for name, means in targets.items():
            _, x, y = _paired(nd, means)
            try:
                result = regress(x, y)
                row.update({
                    f'slope_{name}': result.slope,
                    f'r_squared_{name}': result.r_squared,
                    f'p_value_{name}': result.p_value,
                    f'neg_log10_p_{name}': result.neg_log10_p,
                    f'degenerate_{name}': False,
                })
            except DegenerateRegressorError as e:
                logger.debug('Threshold %g vs %s: %s', t, name, e.detail)
                row.update({
                    f'slope_{name}': math.nan,
                    f'r_squared_{name}': math.nan,
                    f'p_value_{name}': math.nan,
                    f'neg_log10_p_{name}': math.nan,
                    f'degenerate_{name}': True,
                })
        rows.append(row)
    return pd.DataFrame(rows)
