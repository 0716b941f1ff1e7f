"""
Centering, sphering and PCA.
"""

import logging

import numpy as np

from core.exceptions import InvalidParamsError, RankDeficientError
from decompositions.domain import Decomposition, PCAParams

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10


def centered_data(data) -> np.ndarray:
    """Channel-centered matrix from a Dataset or an array."""
    if hasattr(data, 'centered'):
        return data.centered()
    x = np.asarray(data, dtype=np.float64)
    return x - x.mean(axis=1, keepdims=True)


def covariance(x: np.ndarray) -> np.ndarray:
    return x @ x.T / x.shape[1]


def _eig_descending(C: np.ndarray):
    eigenvalues, eigenvectors = np.linalg.eigh(C)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues, eigenvectors = eigenvalues[order], eigenvectors[:, order]
    limit = RANK_TOLERANCE * max(eigenvalues[0], 0.0)
    deficient = np.flatnonzero(eigenvalues <= limit)
    if eigenvalues[0] <= 0 or deficient.size:
        index = int(deficient[0]) if deficient.size else 0
        raise RankDeficientError(
            f'Covariance is rank deficient: eigenvalue {index} (descending) is '
            f'{eigenvalues[index]:.3e}', eigen_index=index, eigenvalue=float(eigenvalues[index]))
    return eigenvalues, eigenvectors


def sphere(data) -> np.ndarray:
    """
    Symmetric sphering matrix S = C^(-1/2).

    Args:
        data: Dataset or channels x samples array (centered internally)

    Returns:
        S with cov(S x) = I

    Raises:
        RankDeficientError: Names the deficient eigenvalue index
    """
    eigenvalues, U = _eig_descending(covariance(centered_data(data)))
    return (U / np.sqrt(eigenvalues)) @ U.T


def pca(data, params: PCAParams = None) -> Decomposition:
    """
    Principal components sorted by descending variance.

    Rows of W are unit covariance eigenvectors with their largest-magnitude
    entry made positive.
    """
    params = params or PCAParams()
    x = centered_data(data)
    n = x.shape[0]
    k = n if params.k is None else int(params.k)
    if k > n:
        raise InvalidParamsError(f'PCA k={k} exceeds the channel count {n}')

    eigenvalues, U = _eig_descending(covariance(x))
    W = U[:, :k].T.copy()
    flip = np.sign(W[np.arange(k), np.argmax(np.abs(W), axis=1)])
    W *= flip[:, None]
    logger.debug('PCA: %d of %d components, explained %.4f', k, n, eigenvalues[:k].sum() / eigenvalues.sum())
    return Decomposition(W=W, A=W.T if k < n else None, algorithm_id='pca',
                         trace={'explained_variance': eigenvalues[:k].tolist()})
