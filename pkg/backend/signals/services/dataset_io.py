"""
Dataset file formats.

binary: `<id>.icab` holds n_channels x n_samples little-endian float64,
channel-major; `<id>.icab.json` is the header
{id, n_channels, n_samples, srate, labels}.
csv: first row holds the labels, one column per channel, srate given by
the caller.

@CODE:SIG-IO
"""

import io
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from core.exceptions import DatasetIOError, DatasetParseError, InvalidSpecError, ShapeMismatchError
from core.io_utils import atomic_write_bytes, atomic_write_text, exact_float_values, read_json, write_json
from signals.domain import Dataset

logger = logging.getLogger(__name__)

FORMATS = ('binary', 'csv')
HEADER_FIELDS = ('id', 'n_channels', 'n_samples', 'srate', 'labels')
ITEMSIZE = 8


def infer_format(path) -> str:
    suffixes = Path(path).suffixes
    return 'csv' if suffixes and suffixes[-1].lower() == '.csv' else 'binary'


def _binary_paths(path):
    path = Path(path)
    if path.name.endswith('.icab.json'):
        return path.with_name(path.name[:-len('.json')]), path
    return path, path.with_name(path.name + '.json')


def _load_binary(path) -> Dataset:
    payload_path, header_path = _binary_paths(path)
    header = read_json(header_path)

    if not isinstance(header, dict):
        raise DatasetParseError(f'Header {header_path} must be a JSON object', path=str(header_path))
    missing = [key for key in HEADER_FIELDS if key not in header]
    if missing:
        raise DatasetParseError(
            f'Header {header_path} is missing fields {missing}', path=str(header_path))

    n, N = int(header['n_channels']), int(header['n_samples'])
    try:
        raw = payload_path.read_bytes()
    except OSError as e:
        raise DatasetIOError(f'Failed to read {payload_path}: {e}', path=str(payload_path)) from e

    expected = n * N * ITEMSIZE
    if len(raw) != expected:
        rows = len(raw) / (N * ITEMSIZE) if N else 0
        raise ShapeMismatchError(
            f'{payload_path}: header declares {n} channels x {N} samples ({expected} bytes), '
            f'payload has {len(raw)} bytes ({rows:g} channel rows)',
            path=str(payload_path), expected_bytes=expected, actual_bytes=len(raw),
        )

    data = np.frombuffer(raw, dtype='<f8').reshape(n, N)
    bad = np.flatnonzero(~np.isfinite(data))
    if bad.size:
        offset = int(bad[0]) * ITEMSIZE
        ch, t = divmod(int(bad[0]), N)
        raise DatasetParseError(
            f'{payload_path}: non-finite value at byte offset {offset} (channel {ch}, sample {t})',
            path=str(payload_path), byte_offset=offset, channel=ch, sample=t,
        )

    return Dataset(data=data.astype(np.float64), srate=header['srate'],
                   labels=header['labels'], id=str(header['id']))


def _load_csv(path, srate, dataset_id=None) -> Dataset:
    path = Path(path)
    if srate is None:
        raise InvalidSpecError('CSV datasets need an explicit srate', path=str(path))
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except OSError as e:
        raise DatasetIOError(f'Failed to read {path}: {e}', path=str(path)) from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DatasetParseError(f'{path}: {e}', path=str(path)) from e

    values = exact_float_values(frame)
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        row, col = (int(v) for v in bad[0])
        # Line 1 is the label row
        line = row + 2
        raise DatasetParseError(
            f'{path}: invalid value {frame.iat[row, col]!r} at line {line}, '
            f'column {col + 1} ({frame.columns[col]})',
            path=str(path), line=line, column=col + 1,
        )

    return Dataset(data=values.T, srate=srate, labels=list(frame.columns),
                   id=dataset_id or path.name[:-len(path.suffix)])


def load_dataset(path, format=None, srate=None, dataset_id=None) -> Dataset:
    """
    Read a Dataset from disk.

    Args:
        path: Payload, header or CSV path
        format: 'binary' or 'csv'; inferred from the suffix when None
        srate: Sampling rate for CSV input
        dataset_id: Identifier for CSV input (defaults to the file stem)

    Returns:
        Validated Dataset

    Raises:
        DatasetParseError: Malformed header or non-finite value (names the offset)
        ShapeMismatchError: Payload size disagrees with the header
    """
    format = format or infer_format(path)
    if format not in FORMATS:
        raise InvalidSpecError(f'Unknown dataset format {format!r}; expected one of {FORMATS}')
    dataset = _load_binary(path) if format == 'binary' else _load_csv(path, srate, dataset_id)
    logger.debug('Loaded %s (%d x %d) from %s', dataset.id, dataset.n_channels, dataset.n_samples, path)
    return dataset


def save_dataset(dataset: Dataset, path, format=None) -> Path:
    """
    Write a Dataset; binary output also writes the JSON header sidecar.

    Returns:
        Path of the payload (or CSV) file
    """
    format = format or infer_format(path)
    if format not in FORMATS:
        raise InvalidSpecError(f'Unknown dataset format {format!r}; expected one of {FORMATS}')

    if format == 'csv':
        path = Path(path)
        buffer = io.StringIO()
        pd.DataFrame(dataset.data.T, columns=list(dataset.labels)).to_csv(
            buffer, index=False, float_format='%.17g')
        atomic_write_text(path, buffer.getvalue())
        return path

    payload_path, header_path = _binary_paths(path)
    atomic_write_bytes(payload_path, np.ascontiguousarray(dataset.data, dtype='<f8').tobytes())
    write_json(header_path, {
        'id': dataset.id,
        'n_channels': dataset.n_channels,
        'n_samples': dataset.n_samples,
        'srate': dataset.srate,
        'labels': list(dataset.labels),
    })
    return payload_path
