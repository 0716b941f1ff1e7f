"""
(Extended) Infomax by stochastic natural-gradient ascent on sphered data.

Logistic update:  W += l (b I + (1 - 2 y) u^T) W
Extended update:  W += l (b I - K tanh(u) u^T - u u^T) W, K = diag(signs)

with blocks u of b randomly permuted samples. The learning rate is annealed
when successive weight changes turn by more than anneal_deg; a blow-up
restarts from the initial weights with a lower rate.

@CODE:DEC-INFOMAX
"""

import logging
import math

import numpy as np
from scipy.stats import kurtosis

from core.exceptions import NumericalBlowupError
from decompositions.domain import Decomposition, InfomaxParams
from decompositions.services.preprocessing import centered_data, sphere

logger = logging.getLogger(__name__)

BLOWUP = 1e4
BLOWUP_FACTOR = 0.5
EXT_MOMENTUM = 0.5
SIGNS_BIAS = 0.02
SIGNCOUNT_THRESHOLD = 25
SIGNCOUNT_STEP = 2
DEGREES = 180.0 / math.pi


def default_lrate(n: int) -> float:
    return 1e-3 / math.log(n)


def default_block(N: int) -> int:
    return int(math.ceil(min(5.0 * math.log(N), 0.3 * N)))


class _Blowup(Exception):
    pass


def _initial_signs(n, n_subgauss):
    signs = np.ones(n)
    signs[:min(n_subgauss, n)] = -1.0
    return signs


def _train(Z, params: InfomaxParams, lrate: float, block: int, rng):
    """One training attempt; raises _Blowup when the weights diverge."""
    n, N = Z.shape
    W = np.eye(n)
    bias = np.zeros((n, 1))
    BI = block * np.eye(n)
    anneal_step = params.resolved_anneal_step
    ext_blocks = params.ext_blocks
    kurt_size = min(params.kurt_size, N)

    signs = _initial_signs(n, params.n_subgauss) if params.extended else None
    old_kurt = np.zeros(n)
    signcount = 0
    blockno = 0

    old_W = W.copy()
    old_delta, old_change = None, 0.0
    history = []
    converged = False
    step = 0

    while step < params.max_iter:
        permute = rng.permutation(N)
        for t in range(0, N - block + 1, block):
            u = W @ Z[:, permute[t:t + block]] + bias
            if params.extended:
                y = np.tanh(u)
                W += lrate * (BI - (signs[:, None] * y) @ u.T - u @ u.T) @ W
                bias += lrate * (-2.0 * y.sum(axis=1, keepdims=True))
            else:
                y = 1.0 / (1.0 + np.exp(-u))
                W += lrate * (BI + (1.0 - 2.0 * y) @ u.T) @ W
                bias += lrate * (1.0 - 2.0 * y).sum(axis=1, keepdims=True)

            if not np.all(np.isfinite(W)) or np.max(np.abs(W)) > params.max_weight:
                raise _Blowup()

            blockno += 1
            if params.extended and blockno % ext_blocks == 0:
                if kurt_size < N:
                    sample = Z[:, rng.integers(0, N, kurt_size)]
                else:
                    sample = Z
                kurt = kurtosis(W @ sample, axis=1, fisher=True)
                kurt = EXT_MOMENTUM * old_kurt + (1.0 - EXT_MOMENTUM) * kurt
                old_kurt = kurt
                new_signs = np.where(kurt + SIGNS_BIAS < 0, -1.0, 1.0)
                signcount = signcount + 1 if np.array_equal(new_signs, signs) else 0
                signs = new_signs
                if signcount >= SIGNCOUNT_THRESHOLD:
                    ext_blocks = int(ext_blocks * SIGNCOUNT_STEP)
                    signcount = 0

        step += 1
        delta = (W - old_W).ravel()
        change = float(delta @ delta)
        history.append(change)
        angle = 0.0
        if step > 1 and old_delta is not None and change > 0 and old_change > 0:
            cosine = float(delta @ old_delta) / math.sqrt(change * old_change)
            angle = math.acos(min(max(cosine, -1.0), 1.0)) * DEGREES

        old_W = W.copy()
        if angle > params.anneal_deg:
            lrate *= anneal_step
            old_delta, old_change = delta, change
        elif step == 1:
            old_delta, old_change = delta, change

        logger.debug('infomax step %d: change %.3e, angle %.1f, lrate %.3e', step, change, angle, lrate)
        if step > 2 and change < params.w_change:
            converged = True
            break
        if change > BLOWUP:
            lrate *= BLOWUP_FACTOR

    return W, step, converged, history, signs


def infomax(data, params: InfomaxParams = None) -> Decomposition:
    """
    Infomax ICA; params.extended selects Extended Infomax.

    Args:
        data: Dataset or channels x samples array
        params: InfomaxParams

    Returns:
        Decomposition (W includes the sphering matrix)

    Raises:
        NumericalBlowupError: Weights diverge even below min_lrate
    """
    params = params or InfomaxParams()
    algorithm_id = 'ext-infomax' if params.extended else 'infomax'
    x = centered_data(data)
    S = sphere(x)
    Z = S @ x
    n, N = Z.shape

    lrate = params.lrate or default_lrate(n)
    block = int(params.block or default_block(N))
    rng = np.random.default_rng(params.seed)
    restarts = 0

    while True:
        try:
            W, steps, converged, history, signs = _train(Z, params, lrate, block, rng)
            break
        except _Blowup:
            restarts += 1
            lrate *= params.restart_factor
            if lrate <= params.min_lrate:
                raise NumericalBlowupError(
                    f'{algorithm_id}: weights diverged; learning rate fell below {params.min_lrate}',
                    restarts=restarts)
            logger.warning('%s: weights blew up, restarting with lrate %.3e', algorithm_id, lrate)

    if converged:
        logger.info('%s converged in %d steps (change %.2e)', algorithm_id, steps, history[-1])
    else:
        logger.warning('%s reached max_iter=%d (change %.2e)', algorithm_id, params.max_iter, history[-1])

    trace = {'weight_change': history, 'restarts': restarts, 'final_lrate': lrate}
    if signs is not None:
        trace['density_signs'] = signs.tolist()
    return Decomposition(
        W=W @ S,
        algorithm_id=algorithm_id,
        params_digest=params.digest(algorithm_id),
        iterations_used=steps,
        converged=converged,
        trace=trace,
        warnings=() if converged else (f'weight change above {params.w_change} after {steps} steps',),
    )
