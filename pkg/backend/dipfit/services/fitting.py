"""
Single equivalent-dipole fitting.

The position is found by a coarse lattice scan followed by Nelder-Mead
refinement on residual variance; at every candidate position the moment
is the linear least-squares solution, so it never enters the nonlinear
search.

@CODE:DIP-FIT
"""

import logging
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from core.exceptions import MontageError, ShapeMismatchError, UndefinedResidualVarianceError
from dipfit.domain import MIN_FIT_ELECTRODES, Dipole, DipoleFit, FitOptions, HeadModel, Montage
from dipfit.services.forward import average_reference, lead_field, lead_fields

logger = logging.getLogger(__name__)

BOUNDARY_MARGIN = 1e-3


def search_grid(head: HeadModel, spacing: float, fraction: float) -> np.ndarray:
    """Cubic lattice points (spacing mm, origin included) within fraction * inner radius."""
    limit = fraction * head.inner_radius
    k = int(np.floor(limit / spacing))
    axis = np.arange(-k, k + 1) * spacing
    grid = np.stack(np.meshgrid(axis, axis, axis, indexing='ij'), axis=-1).reshape(-1, 3)
    return grid[np.linalg.norm(grid, axis=1) <= limit]


@lru_cache(maxsize=8)
def _grid_operators(montage: Montage, head: HeadModel, spacing: float, fraction: float, max_degree: int):
    grid = search_grid(head, spacing, fraction)
    electrodes = montage.projected(head.outer_radius)[montage.used_indices]
    L = average_reference(lead_fields(grid, electrodes, head, max_degree), axis=1)
    pinv = np.linalg.pinv(L)
    logger.debug('Cached %d grid lead fields for %d electrodes', len(grid), len(electrodes))
    return grid, L, pinv


def residual_variance(values: np.ndarray, model: np.ndarray) -> float:
    """||v - model||^2 / ||v||^2 for average-referenced maps."""
    power = float(values @ values)
    if power == 0.0:
        raise UndefinedResidualVarianceError()
    residual = values - model
    return float(min(max((residual @ residual) / power, 0.0), 1.0))


def _prepare_map(values, montage: Montage) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64).ravel()
    used = montage.used_indices
    if len(used) < MIN_FIT_ELECTRODES:
        raise MontageError(f'Dipole fitting needs at least {MIN_FIT_ELECTRODES} electrodes, got {len(used)}')
    if values.shape[0] == montage.n_electrodes:
        values = values[used]
    elif values.shape[0] != len(used):
        raise ShapeMismatchError(
            f'Map has {values.shape[0]} values; montage has {montage.n_electrodes} electrodes '
            f'({len(used)} used)')
    if not np.all(np.isfinite(values)):
        raise UndefinedResidualVarianceError('Scalp map contains non-finite values')
    values = average_reference(values)
    if not np.any(values):
        raise UndefinedResidualVarianceError()
    return values


def _solve_at(position, values, montage, head, max_degree):
    L = lead_field(position, montage, head, max_degree, reference='average')
    moment, *_ = np.linalg.lstsq(L, values, rcond=None)
    model = L @ moment
    return moment, model, residual_variance(values, model)


def fit_dipole(values, montage: Montage, head: HeadModel, opts: FitOptions = None) -> DipoleFit:
    """
    Fit one equivalent dipole to a scalp map.

    Args:
        values: Map over all montage electrodes or over the used ones
        montage: Electrode layout (excluded channels are dropped)
        head: Head model
        opts: Grid and refinement settings

    Returns:
        DipoleFit with rv of the average-referenced maps

    Raises:
        UndefinedResidualVarianceError: All-zero map after referencing
    """
    opts = opts or FitOptions()
    v = _prepare_map(values, montage)
    grid, L, pinv = _grid_operators(montage, head, opts.grid_spacing, opts.search_fraction, opts.max_degree)

    moments = pinv @ v
    models = np.einsum('gej,gj->ge', L, moments)
    residuals = np.sum((v[None, :] - models) ** 2, axis=1) / (v @ v)
    best = int(np.argmin(residuals))
    position = grid[best]
    iterations = 0

    limit = opts.search_fraction * head.inner_radius
    if opts.refine:
        def objective(p):
            excess = np.linalg.norm(p) - limit
            if excess > 0:
                return 1.0 + excess
            return _solve_at(p, v, montage, head, opts.max_degree)[2]

        simplex = position + np.vstack([np.zeros(3), 0.5 * opts.grid_spacing * np.eye(3)])
        result = minimize(objective, position, method='Nelder-Mead', options={
            'initial_simplex': simplex,
            'xatol': opts.xatol,
            'fatol': 1e-12,
            'maxiter': opts.max_refine_iter,
        })
        iterations = int(result.nit)
        if np.linalg.norm(result.x) <= limit and result.fun <= residuals[best]:
            position = result.x

    moment, model, rv = _solve_at(position, v, montage, head, opts.max_degree)
    boundary = bool(np.linalg.norm(position) >= limit * (1.0 - BOUNDARY_MARGIN))
    if boundary:
        logger.debug('Dipole fit ended on the search boundary at %.2f mm', np.linalg.norm(position))
    return DipoleFit(
        dipole=Dipole(position=tuple(position), moment=tuple(moment)),
        rv=rv,
        projected_map=model,
        fit_iterations=iterations,
        boundary=boundary,
    )
