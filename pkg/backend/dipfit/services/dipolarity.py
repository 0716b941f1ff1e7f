"""
Near-dipolarity (ND%) of component scalp maps.

@CODE:DIP-ND
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from core.conf import icabench_settings
from core.exceptions import IcaBenchError, ShapeMismatchError
from dipfit.domain import DipolarityReport, FitOptions, HeadModel, Montage
from dipfit.services.fitting import fit_dipole

logger = logging.getLogger(__name__)

RAW_MAPS = 71


def _thresholds(thresholds):
    values = icabench_settings.ND_THRESHOLDS if thresholds is None else thresholds
    return tuple(float(t) for t in values)


def _fit_one(index, values, montage, head, opts):
    try:
        return index, fit_dipole(values, montage, head, opts), None
    except IcaBenchError as e:
        logger.warning('Dipole fit failed for map %d: [%s] %s', index, e.code, e.detail)
        return index, None, {'component': index, **e.as_record()}


def fit_maps(maps: np.ndarray, montage: Montage, head: HeadModel, thresholds=None,
             opts: FitOptions = None, threads: int = 1) -> DipolarityReport:
    """
    Fit every column of `maps` and assemble the ND% curve.

    Args:
        maps: Channels x maps matrix (channels = montage electrodes or used electrodes)
        montage, head: Forward model geometry
        thresholds: rv thresholds (settings grid when None)
        opts: Fit options
        threads: Parallel fits; output order follows column index

    Returns:
        DipolarityReport; failed fits are non-dipolar and listed
    """
    maps = np.asarray(maps, dtype=np.float64)
    if maps.ndim != 2 or maps.shape[0] not in (montage.n_electrodes, len(montage.used_indices)):
        raise ShapeMismatchError(
            f'Maps have {maps.shape[0] if maps.ndim == 2 else maps.shape} rows; montage has '
            f'{montage.n_electrodes} electrodes ({len(montage.used_indices)} used)')
    opts = opts or FitOptions()
    jobs = [(k, maps[:, k], montage, head, opts) for k in range(maps.shape[1])]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: _fit_one(*job), jobs))
    else:
        results = [_fit_one(*job) for job in jobs]
    results.sort(key=lambda item: item[0])

    report = DipolarityReport(
        rv=tuple(fit.rv if fit is not None else None for _, fit, _ in results),
        thresholds=_thresholds(thresholds),
        failed_components=tuple(k for k, fit, _ in results if fit is None),
        errors=tuple(err for _, _, err in results if err is not None),
        fits=tuple(fit for _, fit, _ in results if fit is not None),
    )
    logger.info('Fitted %d maps: ND at 5%% = %.2f%%, %d failed',
                report.n_components, report.nd_percent(0.05), len(report.failed_components))
    return report


def dipolarity(dec, montage: Montage, head: HeadModel, thresholds=None,
               opts: FitOptions = None, threads: int = 1) -> DipolarityReport:
    """Dipolarity of the columns of dec.A (the component scalp maps)."""
    return fit_maps(dec.A, montage, head, thresholds, opts, threads)


def raw_data_dipolarity(dataset, montage: Montage, head: HeadModel, n_maps: int = RAW_MAPS,
                        seed: int = 0, thresholds=None, opts: FitOptions = None,
                        threads: int = 1) -> DipolarityReport:
    """
    Baseline dipolarity of randomly chosen raw time-point scalp maps.

    Args:
        dataset: Dataset whose channels match the montage
        n_maps: Number of time points drawn without replacement
        seed: Selection seed
    """
    rng = np.random.default_rng(seed)
    n_maps = min(int(n_maps), dataset.n_samples)
    columns = np.sort(rng.choice(dataset.n_samples, size=n_maps, replace=False))
    return fit_maps(dataset.centered()[:, columns], montage, head, thresholds, opts, threads)
