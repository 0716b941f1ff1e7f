"""
Pytest configuration and shared fixtures.
"""
import os

import django
import numpy as np
import pytest


os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
django.setup()


@pytest.fixture
def rng():
    """Seeded generator so every test draws the same samples."""
    return np.random.default_rng(20240611)


@pytest.fixture
def laplace_mixture():
    """Three Laplacian sources, random general mixing, 5000 samples."""
    from signals.domain import SynthSpec
    from signals.services.synthesis import synth_dataset

    spec = SynthSpec(n_sources=3, n_samples=5000, source_kinds=('laplacian',),
                     mixing='random-general', seed=7, dataset_id='laplace3')
    return synth_dataset(spec)


@pytest.fixture
def laplace_dataset(laplace_mixture):
    dataset, _ = laplace_mixture
    return dataset


@pytest.fixture
def mixed_kurtosis_mixture():
    """Two super- and two sub-Gaussian sources for the extended density."""
    from signals.domain import SynthSpec
    from signals.services.synthesis import synth_dataset

    spec = SynthSpec(n_sources=4, n_samples=10000,
                     source_kinds=('laplacian', 'laplacian', 'uniform', 'bimodal'),
                     mixing='random-general', seed=11, dataset_id='mixed4')
    return synth_dataset(spec)


@pytest.fixture
def head():
    from dipfit.domain import HeadModel

    return HeadModel.default()


@pytest.fixture
def cap32(head):
    from dipfit.services.montage_io import cap_montage

    return cap_montage(32, radius=head.outer_radius)


@pytest.fixture
def fast_fit_options():
    """Coarser grid for tests that fit many maps."""
    from dipfit.domain import FitOptions

    return FitOptions(grid_spacing=12.0, max_refine_iter=200)


@pytest.fixture
def write_config(tmp_path):
    """Write a bench config JSON into tmp_path and return its path."""
    from core.io_utils import write_json

    def _write(payload, name='bench.json'):
        payload = {'output_dir': str(tmp_path / 'results'), **payload}
        return write_json(tmp_path / name, payload)

    return _write
