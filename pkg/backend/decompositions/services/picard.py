"""
Picard and Picard-O: preconditioned L-BFGS maximum-likelihood ICA.

Both minimise

    L(W) = -log|det W| - E[sum_i log p(y_i)],  y = W z

over sphered data z in the relative parameterization. Picard updates
W <- (I + alpha D) W; Picard-O keeps W orthogonal with W <- expm(alpha D) W
and a skew-symmetric D, so the log-determinant term is constant.

The L-BFGS two-loop recursion uses a block-diagonal Hessian approximation
(2 x 2 blocks per component pair) as the initial inverse-Hessian guess.

@CODE:DEC-PICARD
"""

import logging
from collections import deque

import numpy as np
from scipy.linalg import expm
from scipy.stats import ortho_group

from core.exceptions import NonFiniteLossError, SingularMatrixError
from decompositions.domain import Decomposition, DensityModel, PicardParams
from decompositions.services.preprocessing import centered_data, sphere

logger = logging.getLogger(__name__)

CURVATURE_EPS = 1e-12
LOGCOSH = DensityModel('logcosh')


def negative_log_likelihood(W, data, density: DensityModel = None, signs=None,
                            centered: bool = False) -> float:
    """
    Likelihood loss of W on zero-mean data.

    Args:
        W: n x n unmixing matrix
        data: Dataset or channels x samples array
        density: Source density (logcosh when None)
        signs: Per-component signs for the extended density
        centered: Skip centering when the array is already zero-mean

    Raises:
        SingularMatrixError: det W = 0
    """
    density = density or LOGCOSH
    x = np.asarray(data, dtype=np.float64) if centered else centered_data(data)
    W = np.asarray(W, dtype=np.float64)
    sign, logdet = np.linalg.slogdet(W)
    if sign == 0 or not np.isfinite(logdet):
        raise SingularMatrixError('Cannot evaluate the likelihood of a singular W')
    Y = W @ x
    return -logdet + float(np.sum(np.mean(density.neg_log_pdf(Y, signs), axis=1)))


def relative_gradient(W, data, density: DensityModel = None, signs=None, centered: bool = False) -> np.ndarray:
    """E[psi(y) y^T] - I, the gradient of L in the relative parameterization."""
    density = density or LOGCOSH
    x = np.asarray(data, dtype=np.float64) if centered else centered_data(data)
    Y = np.asarray(W, dtype=np.float64) @ x
    return density.score(Y, signs) @ Y.T / Y.shape[1] - np.eye(Y.shape[0])


def kurtosis_signs(Y: np.ndarray) -> np.ndarray:
    """
    +1 for super-Gaussian, -1 for sub-Gaussian components.

    Sign of E[sech^2 y] E[y^2] - E[tanh(y) y]; ties count as super-Gaussian.
    """
    th = np.tanh(Y)
    K = np.mean(1.0 - th ** 2, axis=1) * np.mean(Y ** 2, axis=1) - np.mean(th * Y, axis=1)
    return np.where(K < 0, -1.0, 1.0)


def hessian_approximation(Y, psidY, lambda_min) -> np.ndarray:
    """
    h_ij = E[psi'(y_i)] E[y_j^2] with the 2 x 2 blocks of (h_ij, h_ji) made
    positive definite: the smaller block eigenvalue is floored at lambda_min.
    """
    h = np.mean(psidY, axis=1)[:, None] * np.mean(Y ** 2, axis=1)[None, :]
    discr = np.sqrt((h - h.T) ** 2 + 4.0)
    eigenvalues = 0.5 * (h + h.T - discr)
    low = eigenvalues < lambda_min
    np.fill_diagonal(low, False)
    h[low] += lambda_min - eigenvalues[low]
    return h


def solve_hessian(G: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Apply the inverse of the block-diagonal Hessian approximation to G."""
    out = (G * h.T - G.T) / (h * h.T - 1.0)
    diag = np.diag(G) / (np.diag(h) + 1.0)
    np.fill_diagonal(out, diag)
    return out


def orthogonal_preconditioner(psidY, g, lambda_min) -> np.ndarray:
    """(K_i + K_j) / 2 with K_i = E[psi'(y_i)] - g_ii, floored at lambda_min."""
    K = np.mean(psidY, axis=1) - np.diag(g)
    h = 0.5 * (K[:, None] + K[None, :])
    h[h < lambda_min] = lambda_min
    np.fill_diagonal(h, 1.0)
    return h


def lbfgs_direction(G, precondition, memory) -> np.ndarray:
    """
    Two-loop recursion over (s, y, rho) pairs, oldest first.

    Args:
        G: Current relative gradient
        precondition: Callable applying the initial inverse-Hessian guess
        memory: Iterable of (s, y, rho)

    Returns:
        Descent direction (already negated)
    """
    q = G.copy()
    alphas = []
    for s, y, rho in reversed(memory):
        a = rho * np.sum(s * q)
        alphas.append(a)
        q -= a * y
    z = precondition(q)
    for (s, y, rho), a in zip(memory, reversed(alphas)):
        b = rho * np.sum(y * z)
        z += (a - b) * s
    return -z


class _Problem:
    """Loss and gradient evaluation for one run on sphered data."""

    def __init__(self, Z, density, orthogonal, lambda_min):
        self.Z = Z
        self.N = Z.shape[1]
        self.n = Z.shape[0]
        self.density = density
        self.orthogonal = orthogonal
        self.lambda_min = lambda_min

    def loss(self, W, Y, signs):
        value = float(np.sum(np.mean(self.density.neg_log_pdf(Y, signs), axis=1)))
        if not self.orthogonal:
            sign, logdet = np.linalg.slogdet(W)
            if sign == 0:
                return np.inf
            value -= logdet
        return value

    def gradient(self, Y, signs):
        psiY = self.density.score(Y, signs)
        psidY = self.density.score_derivative(Y, signs)
        g = psiY @ Y.T / self.N
        if self.orthogonal:
            G = 0.5 * (g - g.T)
            h = orthogonal_preconditioner(psidY, g, self.lambda_min)
            return G, lambda q: q / h
        G = g - np.eye(self.n)
        h = hessian_approximation(Y, psidY, self.lambda_min)
        return G, lambda q: solve_hessian(q, h)

    def step(self, W, direction, alpha):
        if self.orthogonal:
            return expm(alpha * direction) @ W
        return W + alpha * direction @ W


def _line_search(problem, W, direction, loss, signs, max_backtracks):
    alpha = 1.0
    for _ in range(max_backtracks):
        W_new = problem.step(W, direction, alpha)
        Y_new = W_new @ problem.Z
        loss_new = problem.loss(W_new, Y_new, signs)
        if np.isfinite(loss_new) and loss_new < loss:
            return True, W_new, Y_new, loss_new, alpha
        alpha *= 0.5
    return False, W, None, loss, 0.0


def _orthogonality_error(W) -> float:
    return float(np.max(np.abs(W @ W.T - np.eye(W.shape[0]))))


def _initial_rotation(params: PicardParams, n: int) -> np.ndarray:
    if params.w_init == 'random':
        return ortho_group.rvs(n, random_state=np.random.default_rng(params.seed)) if n > 1 else np.eye(n)
    return np.eye(n)


def _run(Z, params: PicardParams, algorithm_id: str):
    n = Z.shape[0]
    density = DensityModel('extended' if params.extended else 'logcosh')
    problem = _Problem(Z, density, params.orthogonal, params.lambda_min)

    W = _initial_rotation(params, n)
    Y = W @ Z
    signs = kurtosis_signs(Y) if params.extended else None
    loss = problem.loss(W, Y, signs)
    if not np.isfinite(loss):
        raise NonFiniteLossError(f'{algorithm_id}: initial loss is not finite')

    memory = deque(maxlen=params.m)
    trace = {'loss': [loss], 'gradient_norm': [], 'step_size': []}
    if params.orthogonal:
        trace['orthogonality_error'] = [_orthogonality_error(W)]
    resets = []
    converged = False
    G_old = s_old = None
    iterations = 0

    for iterations in range(1, params.max_iter + 1):
        if params.extended:
            new_signs = kurtosis_signs(Y)
            if np.any(new_signs != signs):
                signs = new_signs
                memory.clear()
                G_old = s_old = None
                loss = problem.loss(W, Y, signs)
                resets.append(iterations)
                trace['loss'].append(loss)
                logger.debug('%s: density signs changed at iteration %d', algorithm_id, iterations)

        G, precondition = problem.gradient(Y, signs)
        gradient_norm = float(np.max(np.abs(G)))
        trace['gradient_norm'].append(gradient_norm)
        if gradient_norm < params.tol:
            converged = True
            break

        if s_old is not None:
            y_diff = G - G_old
            curvature = np.sum(s_old * y_diff)
            if curvature > CURVATURE_EPS:
                memory.append((s_old, y_diff, 1.0 / curvature))

        direction = lbfgs_direction(G, precondition, memory)
        ok, W_new, Y_new, loss_new, alpha = _line_search(
            problem, W, direction, loss, signs, params.ls_max_backtracks)
        if not ok:
            logger.debug('%s: line search failed at iteration %d, using the gradient', algorithm_id, iterations)
            memory.clear()
            direction = -G
            ok, W_new, Y_new, loss_new, alpha = _line_search(
                problem, W, direction, loss, signs, params.ls_max_backtracks)
        if not ok:
            logger.warning('%s: no descent step found at iteration %d (gradient %.2e)',
                           algorithm_id, iterations, gradient_norm)
            break
        s_old = alpha * direction
        G_old = G
        W, Y, loss = W_new, Y_new, loss_new
        trace['loss'].append(loss)
        trace['step_size'].append(alpha)
        if params.orthogonal:
            trace['orthogonality_error'].append(_orthogonality_error(W))

    if converged:
        logger.info('%s converged in %d iterations (gradient %.2e)', algorithm_id, iterations, gradient_norm)
    else:
        logger.warning('%s stopped after %d iterations without reaching tol=%g (gradient %.2e)',
                       algorithm_id, iterations, params.tol, gradient_norm)
    return W, iterations, converged, trace, tuple(resets), signs


def _decompose(data, params: PicardParams, algorithm_id: str) -> Decomposition:
    x = centered_data(data)
    S = sphere(x)
    W, iterations, converged, trace, resets, signs = _run(S @ x, params, algorithm_id)
    if signs is not None:
        trace['density_signs'] = signs.tolist()
    warnings = () if converged else (f'stopping rule not met after {iterations} iterations',)
    return Decomposition(
        W=W @ S,
        algorithm_id=algorithm_id,
        params_digest=params.digest(algorithm_id),
        iterations_used=iterations,
        converged=converged,
        trace=trace,
        objective_resets=resets,
        warnings=warnings,
    )


def picard(data, params: PicardParams = None) -> Decomposition:
    """
    Picard on sphered data; the returned W includes the sphering matrix.

    Args:
        data: Dataset or channels x samples array
        params: PicardParams; orthogonal=True runs picard_o instead

    Returns:
        Decomposition with trace['loss'] non-increasing between objective resets

    Raises:
        NonFiniteLossError: Loss not finite
        RankDeficientError: Singular data covariance
    """
    params = params or PicardParams()
    if params.orthogonal:
        return picard_o(data, params)
    return _decompose(data, params, 'picard')


def picard_o(data, params: PicardParams = None) -> Decomposition:
    """Picard-O: orthogonal W on sphered data, so W cov(x) W^T = I."""
    params = params or PicardParams(orthogonal=True)
    if not params.orthogonal:
        params = PicardParams.from_dict({**params.to_dict(), 'orthogonal': True})
    return _decompose(data, params, 'picard-o')
