"""
Symmetric FastICA with the logcosh, exp and cube contrasts.

@CODE:DEC-FASTICA
"""

import logging

import numpy as np
from scipy import linalg
from scipy.stats import ortho_group

from decompositions.domain import Decomposition, FastICAParams
from decompositions.services.preprocessing import centered_data, sphere

logger = logging.getLogger(__name__)


def symmetric_decorrelation(W: np.ndarray) -> np.ndarray:
    """(W W^T)^(-1/2) W."""
    s, u = linalg.eigh(W @ W.T)
    s = np.clip(s, np.finfo(W.dtype).tiny, None)
    return (u * (1.0 / np.sqrt(s))) @ u.T @ W


def _initial_weights(params: FastICAParams, n: int) -> np.ndarray:
    if params.w_init == 'random' and n > 1:
        return ortho_group.rvs(n, random_state=np.random.default_rng(params.seed))
    return np.eye(n)


def _contrast(Y: np.ndarray, params: FastICAParams):
    """g(Y) and the row means of g'(Y)."""
    if params.fun == 'exp':
        e = np.exp(-0.5 * params.alpha * Y ** 2)
        return Y * e, ((1.0 - params.alpha * Y ** 2) * e).mean(axis=1)
    if params.fun == 'cube':
        return Y ** 3, (3.0 * Y ** 2).mean(axis=1)
    gy = np.tanh(params.alpha * Y)
    return gy, (params.alpha * (1.0 - gy ** 2)).mean(axis=1)


def fastica(data, params: FastICAParams = None) -> Decomposition:
    """
    Parallel fixed-point iteration on sphered data.

    W1 = E[g(W z) z^T] - diag(E[g'(W z)]) W, then symmetric decorrelation.
    Stops when max | |diag(W1 W^T)| - 1 | < tol.

    Returns:
        Decomposition with W including the sphering matrix, so that
        W cov(x) W^T = I. Non-convergence sets converged=False.
    """
    params = params or FastICAParams()
    x = centered_data(data)
    S = sphere(x)
    Z = S @ x
    n, N = Z.shape

    W = symmetric_decorrelation(_initial_weights(params, n))
    history = []
    converged = False
    iterations = 0
    for iterations in range(1, params.max_iter + 1):
        gwz, g_prime_mean = _contrast(W @ Z, params)
        W1 = symmetric_decorrelation(gwz @ Z.T / N - g_prime_mean[:, None] * W)
        lim = float(np.max(np.abs(np.abs(np.einsum('ij,ij->i', W1, W)) - 1.0)))
        W = W1
        history.append(lim)
        if lim < params.tol:
            converged = True
            break

    if converged:
        logger.info('fastica converged in %d iterations (%.2e)', iterations, history[-1])
    else:
        logger.warning('fastica did not converge in %d iterations (%.2e)', params.max_iter, history[-1])

    return Decomposition(
        W=W @ S,
        algorithm_id='fastica',
        params_digest=params.digest('fastica'),
        iterations_used=iterations,
        converged=converged,
        trace={'convergence': history},
        warnings=() if converged else (f'tolerance {params.tol} not met after {iterations} iterations',),
    )
