"""
AMUSE: eigendecomposition of the symmetrized lagged covariance of sphered data.
"""

import logging
import math

import numpy as np

from core.exceptions import InvalidParamsError
from decompositions.domain import AmuseParams, Decomposition
from decompositions.services.preprocessing import centered_data, sphere

logger = logging.getLogger(__name__)

GAP_FACTOR = 5.0


def lagged_covariance(Z: np.ndarray, tau: int) -> np.ndarray:
    """Symmetrized lag-tau covariance."""
    C = Z[:, tau:] @ Z[:, :-tau].T / (Z.shape[1] - tau)
    return 0.5 * (C + C.T)


def amuse(data, params: AmuseParams = None) -> Decomposition:
    """
    Second-order separation by one lagged covariance.

    Components are sorted by descending lagged eigenvalue. When two lagged
    eigenvalues are closer than 5 / sqrt(N) the sources are not identifiable
    at this lag: the result is returned with converged=False and a warning.
    """
    params = params or AmuseParams()
    x = centered_data(data)
    n, N = x.shape
    tau = int(params.tau)
    if N <= tau:
        raise InvalidParamsError(f'tau={tau} needs more than {tau} samples, got {N}')

    S = sphere(x)
    eigenvalues, U = np.linalg.eigh(lagged_covariance(S @ x, tau))
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues, U = eigenvalues[order], U[:, order]

    gap = float(np.min(np.abs(np.diff(eigenvalues)))) if n > 1 else math.inf
    threshold = GAP_FACTOR / math.sqrt(N)
    warnings = ()
    converged = gap >= threshold
    if not converged:
        message = (f'lagged eigenvalues within {gap:.2e} of each other (< {threshold:.2e}); '
                   f'sources are not identifiable at tau={tau}')
        logger.warning('amuse: %s', message)
        warnings = (message,)

    return Decomposition(
        W=U.T @ S,
        algorithm_id='amuse',
        params_digest=params.digest('amuse'),
        converged=converged,
        trace={'lagged_eigenvalues': eigenvalues.tolist(), 'min_gap': gap},
        warnings=warnings,
    )
