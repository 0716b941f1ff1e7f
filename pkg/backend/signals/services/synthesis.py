"""
Synthetic ground-truth mixtures.

Generates standardized independent sources of the requested kinds, mixes
them with a seeded matrix and optionally adds white sensor noise.

@CODE:SIG-SYNTH
"""

import logging
from pathlib import Path
from typing import Tuple

import numpy as np
import pandas as pd
from scipy.signal import lfilter
from scipy.stats import ortho_group

from core.exceptions import InvalidSpecError
from core.io_utils import atomic_write_text, write_json
from signals.domain import Dataset, GroundTruth, SynthSpec
from signals.services.dataset_io import save_dataset

logger = logging.getLogger(__name__)

MAX_CONDITION = 100.0
MAX_RESAMPLES = 1000
DIPOLE_ECCENTRICITY = 0.6


def _draw_source(kind: str, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    if kind == 'laplacian':
        return rng.laplace(size=n_samples)
    if kind == 'uniform':
        return rng.uniform(-1.0, 1.0, size=n_samples)
    if kind == 'gaussian':
        return rng.standard_normal(n_samples)
    if kind == 'logistic':
        return rng.logistic(size=n_samples)
    if kind == 'bimodal':
        # Two well-separated modes, excess kurtosis close to -2
        signs = rng.choice((-1.0, 1.0), size=n_samples)
        return signs * 2.0 + 0.5 * rng.standard_normal(n_samples)
    raise InvalidSpecError(f'Unknown source kind: {kind!r}')


def _standardize(sources: np.ndarray) -> np.ndarray:
    sources = sources - sources.mean(axis=1, keepdims=True)
    return sources / sources.std(axis=1, keepdims=True)


def generate_sources(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    """
    Draw n_sources x n_samples standardized sources.

    Args:
        spec: Validated synthesis recipe
        rng: Generator seeded from spec.seed

    Returns:
        Sources with zero mean and unit variance per row
    """
    sources = np.empty((spec.n_sources, spec.n_samples))
    for i, kind in enumerate(spec.source_kinds):
        s = _draw_source(kind, spec.n_samples, rng)
        if spec.ar_coefficients is not None and spec.ar_coefficients[i] != 0.0:
            s = lfilter([1.0], [1.0, -spec.ar_coefficients[i]], s)
        sources[i] = s
    return _standardize(sources)


def _random_general(n: int, rng: np.random.Generator) -> np.ndarray:
    for _ in range(MAX_RESAMPLES):
        A = rng.standard_normal((n, n))
        if np.linalg.cond(A) < MAX_CONDITION:
            return A
    raise InvalidSpecError(
        f'Could not draw a {n}x{n} mixing matrix with condition number < {MAX_CONDITION}')


def _dipolar(n: int, rng: np.random.Generator):
    from dipfit.domain import Dipole, HeadModel
    from dipfit.services.forward import lead_field
    from dipfit.services.montage_io import cap_montage

    head = HeadModel.default()
    montage = cap_montage(n, radius=head.outer_radius, n_excluded=0)
    limit = DIPOLE_ECCENTRICITY * head.inner_radius

    for _ in range(MAX_RESAMPLES):
        dipoles = []
        columns = []
        for _ in range(n):
            # Uniform in the ball of radius `limit`
            direction = rng.standard_normal(3)
            direction /= np.linalg.norm(direction)
            position = direction * limit * rng.uniform() ** (1.0 / 3.0)
            moment = rng.standard_normal(3)
            moment /= np.linalg.norm(moment)
            dipole = Dipole(position=tuple(position), moment=tuple(moment))
            L = lead_field(position, montage, head, reference='none', use_excluded=True)
            columns.append(L @ moment)
            dipoles.append(dipole)
        A = np.column_stack(columns)
        if np.isfinite(np.linalg.cond(A)) and np.linalg.cond(A) < 1e6:
            return A, tuple(dipoles), montage.labels
    raise InvalidSpecError('Could not draw a well-conditioned dipolar mixing matrix')


def mixing_matrix(spec: SynthSpec, rng: np.random.Generator):
    """Return (A_true, dipoles, labels) for spec.mixing."""
    n = spec.n_sources
    labels = tuple(f'C{i + 1:02d}' for i in range(n))
    if spec.mixing == 'random-orthogonal':
        return ortho_group.rvs(n, random_state=rng), (), labels
    if spec.mixing == 'random-general':
        return _random_general(n, rng), (), labels
    if spec.mixing == 'explicit':
        return np.asarray(spec.mixing_matrix, dtype=np.float64), (), labels
    return _dipolar(n, rng)


def synth_dataset(spec: SynthSpec) -> Tuple[Dataset, GroundTruth]:
    """
    Generate a synthetic mixture and its ground truth.

    Args:
        spec: Synthesis recipe

    Returns:
        (Dataset, GroundTruth) with data = A_true @ sources (+ noise)

    Business Rules:
        - Same seed gives bit-identical output
        - Sources are standardized before mixing
        - Without noise_db the mixture equation holds exactly
    """
    rng = np.random.default_rng(int(spec.seed))
    sources = generate_sources(spec, rng)
    A, dipoles, labels = mixing_matrix(spec, rng)
    ground_truth = GroundTruth(mixing_matrix=A, sources=sources, dipoles=dipoles)

    data = ground_truth.mixing_matrix @ ground_truth.sources
    if spec.noise_db is not None:
        signal_power = data.var(axis=1, keepdims=True)
        noise_std = np.sqrt(signal_power / 10.0 ** (spec.noise_db / 10.0))
        data = data + noise_std * rng.standard_normal(data.shape)

    dataset = Dataset(data=data, srate=spec.srate, labels=labels, id=spec.dataset_id)
    logger.info(
        'Synthesized %s: %d sources x %d samples, mixing=%s, noise_db=%s',
        dataset.id, spec.n_sources, spec.n_samples, spec.mixing, spec.noise_db,
    )
    return dataset, ground_truth


def save_ground_truth(ground_truth: GroundTruth, directory, dataset_id: str, srate: float = 250.0) -> dict:
    """
    Write the mixing matrix as CSV and the sources as a binary dataset.

    Returns:
        Mapping of artifact name to written path
    """
    directory = Path(directory)
    mixing_path = directory / f'{dataset_id}.mixing.csv'

    frame = pd.DataFrame(ground_truth.mixing_matrix)
    atomic_write_text(mixing_path, frame.to_csv(header=False, index=False, float_format='%.17g'))
    sources = Dataset(
        data=ground_truth.sources, srate=srate,
        labels=[f'S{i + 1:02d}' for i in range(ground_truth.sources.shape[0])],
        id=f'{dataset_id}.sources',
    )
    sources_path = save_dataset(sources, directory / f'{dataset_id}.sources.icab')

    paths = {'mixing': str(mixing_path), 'sources': str(sources_path)}
    if ground_truth.dipoles:
        dipoles_path = directory / f'{dataset_id}.dipoles.json'
        write_json(dipoles_path, [d.to_dict() for d in ground_truth.dipoles])
        paths['dipoles'] = str(dipoles_path)
    return paths
