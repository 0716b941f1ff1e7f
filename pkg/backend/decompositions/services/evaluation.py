"""
Ground-truth recovery scores.
"""

import numpy as np

from core.exceptions import ShapeMismatchError, SingularMatrixError


def amari_index(W, A_true) -> float:
    """
    Normalized Amari index of P = W A_true in [0, 1].

    0 iff P is a scaled permutation; an all-equal |P| scores 1.
    Raises SingularMatrixError when either W or A_true is singular.
    """
    W = np.asarray(W, dtype=np.float64)
    A_true = np.asarray(A_true, dtype=np.float64)
    if W.ndim != 2 or W.shape[0] != W.shape[1] or W.shape != A_true.shape:
        raise ShapeMismatchError(f'Amari index needs two n x n matrices, got {W.shape} and {A_true.shape}')
    if np.linalg.slogdet(A_true)[0] == 0:
        raise SingularMatrixError('Ground-truth mixing matrix is singular')
    if np.linalg.slogdet(W)[0] == 0:
        raise SingularMatrixError('Unmixing matrix W is singular')

    n = W.shape[0]
    if n < 2:
        return 0.0
    P = np.abs(W @ A_true)
    row_max = P.max(axis=1)
    col_max = P.max(axis=0)
    if np.any(row_max == 0) or np.any(col_max == 0):
        raise SingularMatrixError('W A_true has an all-zero row or column')
    rows = np.sum(P.sum(axis=1) / row_max - 1.0)
    cols = np.sum(P.sum(axis=0) / col_max - 1.0)
    return float((rows + cols) / (2.0 * n * (n - 1)))


def pairwise_amari(W_a, W_b) -> float:
    """Amari index between two unmixing matrices, W_a inv(W_b)."""
    return amari_index(W_a, np.linalg.inv(np.asarray(W_b, dtype=np.float64)))
