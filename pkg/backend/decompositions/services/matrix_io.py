"""
Unmixing matrix files.

csv: n rows of n comma-separated values, no header.
binary: the dataset payload format with one row per component
(`<name>.icab` + `<name>.icab.json`).
"""

import io
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from core.exceptions import DatasetIOError, DatasetParseError, InvalidSpecError, ShapeMismatchError
from core.io_utils import atomic_write_text, exact_float_values
from decompositions.domain import Decomposition, EmptyParams
from signals.domain import Dataset
from signals.services.dataset_io import FORMATS, infer_format, load_dataset, save_dataset

logger = logging.getLogger(__name__)


def _read_csv_matrix(path) -> np.ndarray:
    path = Path(path)
    try:
        frame = pd.read_csv(path, header=None, dtype=str, keep_default_na=False)
    except OSError as e:
        raise DatasetIOError(f'Failed to read {path}: {e}', path=str(path)) from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DatasetParseError(f'{path}: {e}', path=str(path)) from e

    values = exact_float_values(frame)
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        row, col = (int(v) for v in bad[0])
        raise DatasetParseError(
            f'{path}: invalid value {frame.iat[row, col]!r} at line {row + 1}, column {col + 1}',
            path=str(path), line=row + 1, column=col + 1,
        )
    return values


def read_matrix(path, format=None) -> np.ndarray:
    format = format or infer_format(path)
    if format not in FORMATS:
        raise InvalidSpecError(f'Unknown matrix format {format!r}; expected one of {FORMATS}')
    if format == 'csv':
        return _read_csv_matrix(path)
    return np.array(load_dataset(path, format='binary').data)


def write_matrix(matrix, path, format=None) -> Path:
    matrix = np.asarray(matrix, dtype=np.float64)
    format = format or infer_format(path)
    if format not in FORMATS:
        raise InvalidSpecError(f'Unknown matrix format {format!r}; expected one of {FORMATS}')
    if format == 'csv':
        path = Path(path)
        buffer = io.StringIO()
        pd.DataFrame(matrix).to_csv(buffer, header=False, index=False, float_format='%.17g')
        atomic_write_text(path, buffer.getvalue())
        return path

    k = matrix.shape[0]
    labels = [f'IC{i + 1:03d}' for i in range(k)]
    name = Path(path).name.split('.')[0]
    return save_dataset(Dataset(data=matrix, srate=1.0, labels=labels, id=name), path, format='binary')


def import_decomposition(path, dataset: Dataset, format=None) -> Decomposition:
    """
    Wrap an externally computed unmixing matrix as a Decomposition.

    Raises:
        ShapeMismatchError: Matrix is not n x n for the dataset's n channels
        SingularMatrixError: Matrix cannot be inverted
    """
    W = read_matrix(path, format)
    n = dataset.n_channels
    if W.shape != (n, n):
        raise ShapeMismatchError(
            f'{path}: expected a {n} x {n} unmixing matrix for {dataset.id}, got '
            f'{W.shape[0]} x {W.shape[1] if W.ndim == 2 else 0}',
            path=str(path), expected_n=n, shape=list(W.shape),
        )
    logger.debug('Imported %d x %d unmixing matrix from %s', n, n, path)
    return Decomposition(W=W, algorithm_id='import', params_digest=EmptyParams().digest('import'))


def export_decomposition(dec: Decomposition, path, format=None) -> Path:
    """Write dec.W; CSV values keep 17 significant digits so a re-import is exact."""
    return write_matrix(dec.W, path, format)
