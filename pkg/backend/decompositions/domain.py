"""
Domain types for decompositions.

Types:
- Decomposition: unmixing matrix W, mixing matrix A, fit metadata
- DensityModel: source density used by the likelihood-based algorithms
- PicardParams, InfomaxParams, FastICAParams, AmuseParams, PCAParams
"""

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Dict, Optional, Tuple

import numpy as np

from core.exceptions import InvalidParamsError, SingularMatrixError
from core.io_utils import digest

INVERSE_TOLERANCE = 1e-8
LOG_PI = math.log(math.pi)
FASTICA_CONTRASTS = ('logcosh', 'exp', 'cube')


def _readonly(array):
    out = np.array(array, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Decomposition:
    """
    Result of a decomposition of zero-mean data.

    Attributes:
        W: k x n unmixing matrix (y = W x)
        A: n x k mixing matrix; columns are component scalp maps
        algorithm_id: Registry id of the producing algorithm
        params_digest: sha256 of the canonical parameters
        iterations_used: Optimizer iterations (0 for closed-form methods)
        converged: Stopping rule met before max_iter
        wall_time_sec: Fit time
        trace: Per-iteration histories (loss, gradient norm, weight change)
        objective_resets: Iterations where the objective changed (extended mode)
        warnings: Non-fatal diagnostics
    """
    W: np.ndarray
    A: Optional[np.ndarray] = None
    algorithm_id: str = ''
    params_digest: str = ''
    iterations_used: int = 0
    converged: bool = True
    wall_time_sec: float = 0.0
    trace: Dict[str, list] = field(default_factory=dict)
    objective_resets: Tuple[int, ...] = ()
    warnings: Tuple[str, ...] = ()

    def __post_init__(self):
        W = _readonly(self.W)
        if W.ndim != 2 or W.shape[0] > W.shape[1]:
            raise SingularMatrixError(f'Unmixing matrix must be k x n with k <= n, got {W.shape}')
        if not np.all(np.isfinite(W)):
            raise SingularMatrixError('Unmixing matrix contains non-finite values')
        if np.any(np.all(W == 0, axis=1)):
            raise SingularMatrixError('Unmixing matrix has an all-zero row')
        if self.A is None:
            try:
                A = np.linalg.inv(W) if W.shape[0] == W.shape[1] else np.linalg.pinv(W)
            except np.linalg.LinAlgError as e:
                raise SingularMatrixError(f'Unmixing matrix is singular: {e}') from e
        else:
            A = self.A
        A = _readonly(A)
        deviation = np.max(np.abs(W @ A - np.eye(W.shape[0])))
        if not deviation <= INVERSE_TOLERANCE:
            raise SingularMatrixError(
                f'W A deviates from identity by {deviation:.2e}; W is numerically singular')
        object.__setattr__(self, 'W', W)
        object.__setattr__(self, 'A', A)

    @property
    def n_components(self) -> int:
        return self.W.shape[0]

    def activations(self, centered_data: np.ndarray) -> np.ndarray:
        return self.W @ centered_data

    def to_dict(self) -> dict:
        return {
            'algorithm_id': self.algorithm_id,
            'params_digest': self.params_digest,
            'iterations_used': self.iterations_used,
            'converged': self.converged,
            'wall_time_sec': self.wall_time_sec,
            'n_components': self.n_components,
            'objective_resets': list(self.objective_resets),
            'warnings': list(self.warnings),
        }


@dataclass(frozen=True)
class DensityModel:
    """
    Source density for the likelihood loss.

    logcosh: -log p(y) = log cosh(y) + log(pi), score tanh(y).
    extended: -log p(y) = s log cosh(y) + y^2 / 2 with a per-component sign
    s (+1 super-Gaussian, -1 sub-Gaussian), score s tanh(y) + y.
    """
    kind: str = 'logcosh'

    KINDS = ('logcosh', 'extended')

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InvalidParamsError(f'Unknown density {self.kind!r}; expected one of {self.KINDS}')

    @staticmethod
    def _signs(y, signs):
        if signs is None:
            return 1.0
        return np.asarray(signs, dtype=np.float64).reshape((-1,) + (1,) * (np.ndim(y) - 1))

    def neg_log_pdf(self, y, signs=None):
        logcosh = np.logaddexp(y, -y) - math.log(2.0)
        if self.kind == 'logcosh':
            return logcosh + LOG_PI
        return self._signs(y, signs) * logcosh + 0.5 * y * y

    def score(self, y, signs=None):
        if self.kind == 'logcosh':
            return np.tanh(y)
        return self._signs(y, signs) * np.tanh(y) + y

    def score_derivative(self, y, signs=None):
        sech2 = 1.0 - np.tanh(y) ** 2
        if self.kind == 'logcosh':
            return sech2
        return self._signs(y, signs) * sech2 + 1.0


class _Params:
    """from_dict / to_dict / digest shared by the parameter dataclasses."""

    @classmethod
    def from_dict(cls, data: Optional[dict]):
        data = dict(data or {})
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidParamsError(f'Unknown {cls.__name__} fields: {unknown}')
        try:
            return cls(**data)
        except TypeError as e:
            raise InvalidParamsError(f'Invalid {cls.__name__}: {e}') from e

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self, algorithm_id: str) -> str:
        return digest({'algorithm_id': algorithm_id, 'params': self.to_dict()})

    def _positive(self, *names):
        for name in names:
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise InvalidParamsError(f'{type(self).__name__}.{name} must be > 0, got {value}')


@dataclass(frozen=True)
class PicardParams(_Params):
    """
    Attributes:
        m: L-BFGS memory length
        tol: Stop when max |relative gradient| < tol
        max_iter: Iteration cap
        ls_max_backtracks: Step halvings before falling back to the gradient
        extended: Adapt the density sign per component
        orthogonal: Constrain W to rotations of the sphered data
        lambda_min: Eigenvalue floor of the Hessian approximation
        w_init: 'identity' or 'random' (seeded random rotation)
        seed: Seed for w_init == 'random'
    """
    m: int = 7
    tol: float = 1e-6
    max_iter: int = 500
    ls_max_backtracks: int = 10
    extended: bool = False
    orthogonal: bool = False
    lambda_min: float = 1e-7
    w_init: str = 'identity'
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise InvalidParamsError(f'PicardParams.m must be >= 1, got {self.m}')
        if self.max_iter < 1 or self.ls_max_backtracks < 1:
            raise InvalidParamsError('max_iter and ls_max_backtracks must be >= 1')
        self._positive('tol', 'lambda_min')
        if self.w_init not in ('identity', 'random'):
            raise InvalidParamsError(f"w_init must be 'identity' or 'random', got {self.w_init!r}")


@dataclass(frozen=True)
class InfomaxParams(_Params):
    """
    Attributes:
        extended: Kurtosis-sign switched scores
        lrate: Initial learning rate (1e-3 / ln(n) when None)
        block: Block size (ceil(min(5 ln N, 0.3 N)) when None)
        w_change: Stop when the squared weight change falls below this
        max_iter: Maximum number of passes over the data
        anneal_deg: Angle between successive updates that triggers annealing
        anneal_step: Learning-rate factor on annealing (0.9, extended 0.98)
        n_subgauss: Components starting as sub-Gaussian (extended)
        kurt_size: Sub-sample size for kurtosis estimates (extended)
        ext_blocks: Blocks between kurtosis estimates (extended)
        seed: Seed for the per-pass permutations
    """
    extended: bool = False
    lrate: Optional[float] = None
    block: Optional[int] = None
    w_change: float = 1e-8
    max_iter: int = 100000
    anneal_deg: float = 60.0
    anneal_step: Optional[float] = None
    n_subgauss: int = 1
    kurt_size: int = 6000
    ext_blocks: int = 1
    max_weight: float = 1e8
    restart_factor: float = 0.9
    min_lrate: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        self._positive('lrate', 'block', 'w_change', 'max_iter', 'anneal_deg', 'anneal_step',
                       'kurt_size', 'ext_blocks', 'max_weight', 'min_lrate')
        if not 0 < self.restart_factor < 1:
            raise InvalidParamsError('restart_factor must lie in (0, 1)')
        if self.anneal_step is not None and not self.anneal_step < 1:
            raise InvalidParamsError('anneal_step must lie in (0, 1)')

    @property
    def resolved_anneal_step(self) -> float:
        if self.anneal_step is not None:
            return self.anneal_step
        return 0.98 if self.extended else 0.9


@dataclass(frozen=True)
class FastICAParams(_Params):
    """
    Symmetric FastICA.

    fun: contrast, 'logcosh' (g = tanh(alpha u)), 'exp' (g = u exp(-alpha u^2 / 2))
    or 'cube' (g = u^3); alpha applies to the first two.
    """
    tol: float = 1e-4
    max_iter: int = 1000
    fun: str = 'logcosh'
    alpha: float = 1.0
    w_init: str = 'random'
    seed: int = 0

    def __post_init__(self):
        self._positive('tol', 'max_iter')
        if self.fun not in FASTICA_CONTRASTS:
            raise InvalidParamsError(f'fun must be one of {FASTICA_CONTRASTS}, got {self.fun!r}')
        if not 1.0 <= self.alpha <= 2.0:
            raise InvalidParamsError(f'alpha must lie in [1, 2], got {self.alpha}')
        if self.w_init not in ('identity', 'random'):
            raise InvalidParamsError(f"w_init must be 'identity' or 'random', got {self.w_init!r}")


@dataclass(frozen=True)
class AmuseParams(_Params):
    """tau: lag in samples of the covariance to diagonalize."""
    tau: int = 1

    def __post_init__(self):
        if int(self.tau) < 1:
            raise InvalidParamsError(f'tau must be >= 1, got {self.tau}')


@dataclass(frozen=True)
class PCAParams(_Params):
    """k: retained components (all when None)."""
    k: Optional[int] = None

    def __post_init__(self):
        if self.k is not None and self.k < 1:
            raise InvalidParamsError(f'k must be >= 1, got {self.k}')


@dataclass(frozen=True)
class EmptyParams(_Params):
    """Parameter-free algorithms (identity, import)."""
