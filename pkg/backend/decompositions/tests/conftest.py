"""
Fixtures for decomposition tests.
"""
import pytest


@pytest.fixture
def recovery_mixture():
    """Three Laplacian sources with 20000 samples, enough for Amari < 0.05."""
    from signals.domain import SynthSpec
    from signals.services.synthesis import synth_dataset

    spec = SynthSpec(n_sources=3, n_samples=20000, source_kinds=('laplacian',),
                     mixing='random-general', seed=3, dataset_id='recovery3')
    return synth_dataset(spec)


@pytest.fixture
def ar_mixture():
    """AR(1) Gaussian sources with well separated coefficients."""
    from signals.domain import SynthSpec
    from signals.services.synthesis import synth_dataset

    spec = SynthSpec(n_sources=3, n_samples=20000, source_kinds=('gaussian', 'laplacian', 'uniform'),
                     mixing='random-general', ar_coefficients=(0.9, 0.5, 0.0),
                     seed=5, dataset_id='ar3')
    return synth_dataset(spec)
