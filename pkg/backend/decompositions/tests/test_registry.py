"""
Tests for the algorithm registry and the decompose command

@TEST:DEC-REG
"""

import json

import numpy as np
import pytest


@pytest.mark.unit
class TestRegistry:
    """Parameter resolution and dispatch."""

    def test_unknown_algorithm(self, laplace_dataset):
        """
        @TEST:DEC-REG-001
        """
        from core.exceptions import InvalidParamsError
        from decompositions.services.registry import run_decomposition

        with pytest.raises(InvalidParamsError) as exc:
            run_decomposition('jade', laplace_dataset)
        assert exc.value.code == 'DEC-004'

    def test_fixed_keys(self):
        """
        @TEST:DEC-REG-002
        Variant ids pin their flags
        """
        from core.exceptions import InvalidParamsError
        from decompositions.services.registry import resolve_params

        assert resolve_params('ext-infomax').extended is True
        assert resolve_params('picard-o', {'tol': 1e-5}).orthogonal is True
        with pytest.raises(InvalidParamsError):
            resolve_params('picard', {'orthogonal': True})

    def test_params_type_check(self):
        """
        @TEST:DEC-REG-003
        """
        from core.exceptions import InvalidParamsError
        from decompositions.domain import FastICAParams
        from decompositions.services.registry import resolve_params

        with pytest.raises(InvalidParamsError):
            resolve_params('picard', FastICAParams())

    def test_import_needs_path(self, laplace_dataset):
        """
        @TEST:DEC-REG-004
        """
        from core.exceptions import InvalidParamsError
        from decompositions.services.registry import run_decomposition

        with pytest.raises(InvalidParamsError):
            run_decomposition('import', laplace_dataset)

    @pytest.mark.parametrize('algorithm_id', ['pca', 'fastica', 'picard', 'picard-o', 'identity'])
    def test_run_fills_provenance(self, laplace_dataset, algorithm_id):
        """
        @TEST:DEC-REG-005
        Every run is timed and carries a parameter digest
        """
        from decompositions.services.registry import resolve_params, run_decomposition

        dec = run_decomposition(algorithm_id, laplace_dataset)
        assert dec.algorithm_id == algorithm_id
        assert dec.params_digest == resolve_params(algorithm_id).digest(algorithm_id)
        assert len(dec.params_digest) == 64
        assert dec.wall_time_sec >= 0.0
        assert dec.W.shape == (3, 3)

    def test_digest_depends_on_params(self):
        """
        @TEST:DEC-REG-006
        """
        from decompositions.services.registry import resolve_params

        assert (resolve_params('picard', {'tol': 1e-6}).digest('picard')
                != resolve_params('picard', {'tol': 1e-7}).digest('picard'))
        assert resolve_params('picard').digest('picard') != resolve_params('picard-o').digest('picard-o')


@pytest.mark.integration
class TestDecomposeCommand:
    """manage.py decompose."""

    def test_writes_matrix_and_summary(self, tmp_path, laplace_dataset):
        """
        @TEST:DEC-REG-007
        """
        from django.core.management import call_command

        from decompositions.services.matrix_io import read_matrix
        from signals.services.dataset_io import save_dataset

        path = save_dataset(laplace_dataset, tmp_path / 'laplace3.icab')
        out = tmp_path / 'out'
        call_command('decompose', str(path), '--algorithm', 'fastica', '--seed', '3', '--out', str(out))

        W = read_matrix(out / 'laplace3.fastica.W.csv')
        assert W.shape == (3, 3)
        summary = json.loads((out / 'laplace3.fastica.json').read_text())
        assert summary['params']['seed'] == 3
        assert summary['decomposition']['algorithm_id'] == 'fastica'
        assert np.isfinite(W).all()

    def test_bad_params_exit(self, tmp_path, laplace_dataset):
        """
        @TEST:DEC-REG-008
        Errors surface as CommandError with their code
        """
        from django.core.management import call_command
        from django.core.management.base import CommandError

        from signals.services.dataset_io import save_dataset

        path = save_dataset(laplace_dataset, tmp_path / 'laplace3.icab')
        params = tmp_path / 'params.json'
        params.write_text('{"tol": -1}')
        with pytest.raises(CommandError, match=r'\[DEC-004\]'):
            call_command('decompose', str(path), '--algorithm', 'picard', '--params', str(params),
                         '--out', str(tmp_path))


@pytest.mark.slow
class TestEightSourceRecovery:
    """Every likelihood and contrast method recovers 8 Laplacian sources."""

    @pytest.mark.parametrize('algorithm_id', ['infomax', 'fastica', 'picard', 'picard-o'])
    def test_ten_seeds(self, algorithm_id):
        """
        @TEST:DEC-REG-009
        Amari index below 0.05 on ten seeded 8-source mixtures of 100000 samples
        """
        from decompositions.services.evaluation import amari_index
        from decompositions.services.registry import run_decomposition
        from signals.domain import SynthSpec
        from signals.services.synthesis import synth_dataset

        for seed in range(1, 11):
            dataset, truth = synth_dataset(SynthSpec(n_sources=8, n_samples=100000, seed=seed))
            dec = run_decomposition(algorithm_id, dataset, {'seed': seed})
            assert amari_index(dec.W, truth.mixing_matrix) < 0.05, f'seed {seed}'
