"""
Algorithm registry: one entry point that validates parameters, runs and
times any decomposition by id.

Usage:
    from decompositions.services.registry import run_decomposition
    dec = run_decomposition('picard', dataset, {'tol': 1e-7})
"""

import dataclasses
import logging
import time
from typing import Callable, NamedTuple, Optional, Type

import numpy as np

from core.exceptions import InvalidParamsError
from decompositions.domain import (
    AmuseParams, Decomposition, EmptyParams, FastICAParams, InfomaxParams, PCAParams, PicardParams,
)
from decompositions.services.amuse import amuse
from decompositions.services.fastica import fastica
from decompositions.services.infomax import infomax
from decompositions.services.matrix_io import import_decomposition
from decompositions.services.picard import picard, picard_o
from decompositions.services.preprocessing import pca
from signals.domain import Dataset

logger = logging.getLogger(__name__)


class Algorithm(NamedTuple):
    params_class: Type
    run: Callable
    fixed: dict = {}


def _identity(dataset: Dataset, params=None) -> Decomposition:
    return Decomposition(W=np.eye(dataset.n_channels), algorithm_id='identity')


ALGORITHMS = {
    'pca': Algorithm(PCAParams, pca),
    'infomax': Algorithm(InfomaxParams, infomax, {'extended': False}),
    'ext-infomax': Algorithm(InfomaxParams, infomax, {'extended': True}),
    'fastica': Algorithm(FastICAParams, fastica),
    'picard': Algorithm(PicardParams, picard, {'orthogonal': False}),
    'picard-o': Algorithm(PicardParams, picard_o, {'orthogonal': True}),
    'amuse': Algorithm(AmuseParams, amuse),
    'import': Algorithm(EmptyParams, None),
    'identity': Algorithm(EmptyParams, _identity),
}


def resolve_params(algorithm_id: str, params=None):
    """Validate params (dict, dataclass or None) for algorithm_id."""
    try:
        entry = ALGORITHMS[algorithm_id]
    except KeyError:
        raise InvalidParamsError(
            f'Unknown algorithm {algorithm_id!r}; expected one of {sorted(ALGORITHMS)}') from None

    if params is None or isinstance(params, dict):
        values = dict(params or {})
    elif isinstance(params, entry.params_class):
        values = params.to_dict()
    else:
        raise InvalidParamsError(
            f'{algorithm_id} expects {entry.params_class.__name__}, got {type(params).__name__}')

    for key, value in entry.fixed.items():
        if values.get(key, value) != value:
            raise InvalidParamsError(f'{algorithm_id} requires {key}={value}')
        values[key] = value
    return entry.params_class.from_dict(values)


def run_decomposition(algorithm_id: str, dataset: Dataset, params=None,
                      path: Optional[str] = None) -> Decomposition:
    """
    Run one algorithm on a dataset.

    Args:
        algorithm_id: Registry id (see ALGORITHMS)
        dataset: Input Dataset
        params: Parameter dict or dataclass; defaults when None
        path: Unmixing matrix file for algorithm_id == 'import'

    Returns:
        Decomposition with wall_time_sec and params_digest filled in

    Raises:
        InvalidParamsError: Unknown id, unknown field or invalid value
    """
    params = resolve_params(algorithm_id, params)
    if algorithm_id == 'import' and not path:
        raise InvalidParamsError("algorithm 'import' needs a matrix path")

    logger.info('Running %s on %s (%d x %d)', algorithm_id, dataset.id,
                dataset.n_channels, dataset.n_samples)
    started = time.perf_counter()
    if algorithm_id == 'import':
        dec = import_decomposition(path, dataset)
    else:
        dec = ALGORITHMS[algorithm_id].run(dataset, params)
    elapsed = time.perf_counter() - started

    return dataclasses.replace(
        dec,
        A=dec.A,
        algorithm_id=algorithm_id,
        params_digest=params.digest(algorithm_id),
        wall_time_sec=elapsed,
    )
