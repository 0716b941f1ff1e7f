"""
Montage and head-model files, plus a deterministic synthetic cap.

Montage CSV columns: label,x_mm,y_mm,z_mm (x right, y anterior, z up).
Head model JSON: {"radii_mm": [...], "conductivities": [...]}.
"""

import io
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from core.exceptions import DatasetIOError, MontageError
from core.io_utils import atomic_write_text, exact_float_values, read_json, write_json
from dipfit.domain import HeadModel, Montage

logger = logging.getLogger(__name__)

MONTAGE_COLUMNS = ('label', 'x_mm', 'y_mm', 'z_mm')
GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))
CAP_LOWEST_Z = -0.2


def cap_montage(n: int, radius: float = 85.0, n_excluded: int = 0) -> Montage:
    """
    Fibonacci-spiral electrode cap covering the upper head.

    Args:
        n: Number of electrodes
        radius: Scalp radius in mm
        n_excluded: Number of most frontal electrodes flagged as eye channels

    Returns:
        Montage labeled E001, E002, ...
    """
    if n < 4 + n_excluded:
        raise MontageError(f'A cap of {n} electrodes cannot leave 4 usable after excluding {n_excluded}')
    i = np.arange(n) + 0.5
    z = 1.0 - (1.0 - CAP_LOWEST_Z) * i / n
    rho = np.sqrt(1.0 - z ** 2)
    phi = GOLDEN_ANGLE * np.arange(n)
    unit = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])

    labels = tuple(f'E{k + 1:03d}' for k in range(n))
    frontal = np.argsort(-unit[:, 1], kind='stable')[:n_excluded]
    return Montage(labels=labels, positions=unit * radius,
                   exclude=frozenset(labels[k] for k in frontal))


def load_montage(path, exclude=()) -> Montage:
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except OSError as e:
        raise DatasetIOError(f'Failed to read {path}: {e}', path=str(path)) from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise MontageError(f'{path}: {e}', path=str(path)) from e

    missing = [c for c in MONTAGE_COLUMNS if c not in frame.columns]
    if missing:
        raise MontageError(f'{path}: missing columns {missing}', path=str(path))
    positions = exact_float_values(frame[['x_mm', 'y_mm', 'z_mm']])
    if not np.all(np.isfinite(positions)):
        row = int(np.argwhere(~np.isfinite(positions))[0][0])
        raise MontageError(f'{path}: invalid coordinate at line {row + 2}', path=str(path), line=row + 2)
    return Montage(labels=tuple(frame['label'].astype(str)), positions=positions, exclude=frozenset(exclude))


def save_montage(montage: Montage, path) -> Path:
    path = Path(path)
    frame = pd.DataFrame(montage.positions, columns=['x_mm', 'y_mm', 'z_mm'])
    frame.insert(0, 'label', list(montage.labels))
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format='%.17g')
    atomic_write_text(path, buffer.getvalue())
    return path


def load_head_model(path) -> HeadModel:
    return HeadModel.from_dict(read_json(path))


def save_head_model(head: HeadModel, path) -> Path:
    write_json(path, head.to_dict())
    return Path(path)
