"""
File helpers shared by every app: JSON conversion of numpy values,
atomic writes and stable digests.
"""

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from core.exceptions import DatasetIOError


def to_jsonable(value):
    """Recursively convert numpy scalars/arrays and tuples to JSON types."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, Path):
        return str(value)
    return value


def dumps(payload) -> str:
    """Serialize to JSON with sorted keys so equal payloads give equal text."""
    return json.dumps(to_jsonable(payload), indent=2, sort_keys=True)


def digest(payload) -> str:
    """sha256 of the canonical JSON form of payload."""
    text = json.dumps(to_jsonable(payload), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def atomic_write_bytes(path, data: bytes):
    """Write data to path through a temporary file and os.replace."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
        try:
            with os.fdopen(fd, 'wb') as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as e:
        raise DatasetIOError(f'Failed to write {path}: {e}', path=str(path)) from e


def atomic_write_text(path, text: str):
    atomic_write_bytes(path, text.encode('utf-8'))


def write_json(path, payload) -> Path:
    atomic_write_text(path, dumps(payload) + '\n')
    return Path(path)


def read_json(path):
    """Read a JSON file, raising DatasetIOError with the path on failure."""
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            return json.load(fh)
    except OSError as e:
        raise DatasetIOError(f'Failed to read {path}: {e}', path=str(path)) from e
    except json.JSONDecodeError as e:
        raise DatasetIOError(
            f'Invalid JSON in {path} at line {e.lineno} column {e.colno}: {e.msg}',
            path=str(path), line=e.lineno, column=e.colno,
        ) from e


def _cell_to_float(text) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        return np.nan


def exact_float_values(frame) -> np.ndarray:
    """
    Convert a frame of strings to float64 with correctly rounded parsing.

    Every cell goes through float(), so '%.17g' text reads back to the same
    double. Unparsable cells become NaN; callers locate them with isfinite.
    """
    return frame.astype(str).map(_cell_to_float).to_numpy(dtype=np.float64)
