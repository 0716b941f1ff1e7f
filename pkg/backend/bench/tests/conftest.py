"""
Fixtures for bench tests.
"""
import pytest

ALGORITHMS = ('picard', 'fastica', 'pca')
DATASETS = ('d1', 'd2')

# Per (algorithm, dataset): MIR bits/sample, remnant PMI %, component rv
CELL_VALUES = {
    ('picard', 'd1'): (2.0, 5.0, [0.01, 0.02, 0.08, 0.30]),
    ('picard', 'd2'): (2.2, 6.0, [0.02, 0.04, 0.06, 0.20]),
    ('fastica', 'd1'): (1.8, 10.0, [0.03, 0.07, 0.15, 0.30]),
    ('fastica', 'd2'): (1.9, 12.0, [0.04, 0.09, 0.12, 0.50]),
    ('pca', 'd1'): (1.0, 40.0, [0.20, 0.35, 0.60, 0.80]),
    ('pca', 'd2'): (1.1, 45.0, [0.25, 0.45, 0.55, 0.90]),
}
THRESHOLDS = (0.05, 0.10, 0.20)


def _cell(algorithm, dataset):
    mir_value, remnant, rv = CELL_VALUES[(algorithm, dataset)]
    return {
        'success': True,
        'algorithm': algorithm,
        'dataset': dataset,
        'decomposition': {'algorithm_id': algorithm, 'converged': True, 'iterations_used': 10},
        'mir': {'mir_bits_per_sample': mir_value, 'mir_kbits_per_sec': mir_value * 0.25},
        'remnant_pmi': {'percent': remnant},
        'dipolarity': {'rv': rv, 'thresholds': list(THRESHOLDS), 'failed_components': []},
    }


@pytest.fixture
def toy_report():
    """Three algorithms on two datasets with every metric filled in by hand."""
    from bench.domain import BenchReport
    from bench.services.summary import algorithm_ordering, summarize

    cells = tuple(_cell(a, d) for a in ALGORITHMS for d in DATASETS)
    return BenchReport(
        provenance={'config_digest': 'f' * 64, 'seed': 0, 'algorithms': list(ALGORITHMS),
                    'datasets': list(DATASETS), 'nd_thresholds': list(THRESHOLDS)},
        cells=cells,
        summary=summarize(cells, list(ALGORITHMS), THRESHOLDS),
        ordering=algorithm_ordering(cells, list(ALGORITHMS), list(DATASETS)),
        timings={'cells': [{'algorithm': a, 'dataset': d, 'decomposition_sec': 0.5 + i}
                           for i, a in enumerate(ALGORITHMS) for d in DATASETS]},
    )


@pytest.fixture
def small_grid():
    """Config payload: two 3-channel Laplacian mixtures, MIR and PMI."""
    return {
        'datasets': [
            {'id': 'lap-a', 'synth': {'n_sources': 3, 'n_samples': 4000, 'seed': 1}},
            {'id': 'lap-b', 'synth': {'n_sources': 3, 'n_samples': 4000, 'seed': 2}},
        ],
        'algorithms': ['picard', 'pca', 'identity'],
        'metrics': ['mir', 'pmi'],
        'bins': 32,
        'seed': 5,
    }
