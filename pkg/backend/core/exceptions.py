"""
Custom exceptions for the ICA benchmark workbench.

Every error raised by a service carries a stable error code so that the
benchmark harness can record failures per cell instead of aborting a grid.
"""


class ErrorCodes:
    """Error code constants shared by exceptions and per-cell error records."""
    INVALID_SPEC = 'SIG-001'
    DATASET_PARSE = 'SIG-002'
    SHAPE_MISMATCH = 'SIG-003'
    DATASET_IO = 'SIG-004'
    DEGENERATE_HISTOGRAM = 'INFO-001'
    SINGULAR_MATRIX = 'MIR-001'
    RANK_DEFICIENT = 'DEC-001'
    NUMERICAL_BLOWUP = 'DEC-002'
    NON_FINITE_LOSS = 'DEC-003'
    INVALID_PARAMS = 'DEC-004'
    DIPOLE_DOMAIN = 'DIP-001'
    SERIES_CONVERGENCE = 'DIP-002'
    UNDEFINED_RV = 'DIP-003'
    MONTAGE = 'DIP-004'
    CONFIG_VALIDATION = 'BENCH-001'
    DEGENERATE_REGRESSOR = 'BENCH-002'
    MISSING_METRIC = 'BENCH-003'
    UNEXPECTED = 'BENCH-999'


class IcaBenchError(Exception):
    """
    Base class for all workbench errors.

    Attributes:
        detail: Human-readable message
        code: Error code constant from ErrorCodes
        context: Extra structured information (offsets, indices, paths)
    """
    default_detail = "ICA benchmark error."
    default_code = ErrorCodes.UNEXPECTED

    def __init__(self, detail=None, code=None, **context):
        self.detail = detail or self.default_detail
        self.code = code or self.default_code
        self.context = context
        super().__init__(self.detail)

    def as_record(self):
        """Return the error as a failed-cell record."""
        return {
            'success': False,
            'error_code': self.code,
            'message': self.detail,
            **({'context': self.context} if self.context else {}),
        }


class InvalidSpecError(IcaBenchError):
    """Raised when a synthetic-data specification or a dataset is invalid."""
    default_detail = "Invalid dataset specification."
    default_code = ErrorCodes.INVALID_SPEC


class DatasetParseError(IcaBenchError):
    """Raised when a dataset file cannot be parsed; context names the offset."""
    default_detail = "Dataset file could not be parsed."
    default_code = ErrorCodes.DATASET_PARSE


class ShapeMismatchError(IcaBenchError):
    """Raised when a matrix or file does not have the expected shape."""
    default_detail = "Shape mismatch."
    default_code = ErrorCodes.SHAPE_MISMATCH


class DatasetIOError(IcaBenchError):
    """Raised when a file cannot be read or written."""
    default_detail = "I/O failure."
    default_code = ErrorCodes.DATASET_IO


class DegenerateHistogramError(IcaBenchError):
    """Raised when histogram edges collapse (e.g. constant signal)."""
    default_detail = "Histogram edges are degenerate."
    default_code = ErrorCodes.DEGENERATE_HISTOGRAM


class SingularMatrixError(IcaBenchError):
    """Raised when an unmixing or mixing matrix is singular."""
    default_detail = "Matrix is singular."
    default_code = ErrorCodes.SINGULAR_MATRIX


class RankDeficientError(IcaBenchError):
    """Raised when a covariance matrix is rank deficient."""
    default_detail = "Covariance matrix is rank deficient."
    default_code = ErrorCodes.RANK_DEFICIENT


class NumericalBlowupError(IcaBenchError):
    """Raised when an optimizer diverges after all restarts."""
    default_detail = "Weights diverged."
    default_code = ErrorCodes.NUMERICAL_BLOWUP


class NonFiniteLossError(IcaBenchError):
    """Raised when the likelihood loss becomes non-finite."""
    default_detail = "Loss is not finite."
    default_code = ErrorCodes.NON_FINITE_LOSS


class InvalidParamsError(IcaBenchError):
    """Raised when algorithm parameters fail validation."""
    default_detail = "Invalid algorithm parameters."
    default_code = ErrorCodes.INVALID_PARAMS


class DipoleDomainError(IcaBenchError):
    """Raised when a dipole lies outside the innermost shell."""
    default_detail = "Dipole must lie inside the innermost shell."
    default_code = ErrorCodes.DIPOLE_DOMAIN


class SeriesConvergenceError(IcaBenchError):
    """Raised when the Legendre series has not converged at max_degree."""
    default_detail = "Legendre series did not converge; increase max_degree."
    default_code = ErrorCodes.SERIES_CONVERGENCE


class UndefinedResidualVarianceError(IcaBenchError):
    """Raised when residual variance is undefined (all-zero map)."""
    default_detail = "Residual variance is undefined for an all-zero map."
    default_code = ErrorCodes.UNDEFINED_RV


class MontageError(IcaBenchError):
    """Raised for invalid montages or head models."""
    default_detail = "Invalid montage or head model."
    default_code = ErrorCodes.MONTAGE


class ConfigValidationError(IcaBenchError):
    """Raised when a benchmark configuration is invalid."""
    default_detail = "Invalid benchmark configuration."
    default_code = ErrorCodes.CONFIG_VALIDATION


class DegenerateRegressorError(IcaBenchError):
    """Raised when a regression has a constant regressor or too few points."""
    default_detail = "Regressor is degenerate."
    default_code = ErrorCodes.DEGENERATE_REGRESSOR


class MissingMetricError(IcaBenchError):
    """Raised when a report lacks the metric an analysis or plot needs."""
    default_detail = "Required metric is missing from the report."
    default_code = ErrorCodes.MISSING_METRIC
