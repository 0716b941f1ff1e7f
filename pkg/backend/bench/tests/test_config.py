"""
Tests for benchmark configuration

@TEST:BENCH-CFG
"""

import pytest


@pytest.mark.unit
class TestBenchConfig:
    """Validation of config files."""

    def test_load(self, write_config, small_grid):
        """
        @TEST:BENCH-CFG-001
        Defaults fill in and CLI overrides win
        """
        from bench.domain import BenchConfig

        path = write_config(small_grid)
        cfg = BenchConfig.load(path, bins=64, seed=None)
        assert cfg.bins == 64
        assert cfg.seed == 5
        assert [d.id for d in cfg.datasets] == ['lap-a', 'lap-b']
        assert [a.label for a in cfg.algorithms] == ['picard', 'pca', 'identity']
        assert len(cfg.nd_thresholds) == 40
        # Synthetic recipes without a seed take the run seed
        assert cfg.datasets[0].synth.seed == 1

    def test_digest_ignores_output_dir(self, write_config, small_grid, tmp_path):
        """
        @TEST:BENCH-CFG-002
        """
        from bench.domain import BenchConfig

        path = write_config(small_grid)
        a = BenchConfig.load(path)
        b = BenchConfig.load(path, output_dir=str(tmp_path / 'elsewhere'))
        c = BenchConfig.load(path, bins=16)
        assert a.digest() == b.digest()
        assert a.digest() != c.digest()

    @pytest.mark.parametrize('change', [
        {'colour': 'red'},
        {'metrics': ['mir', 'entropy']},
        {'algorithms': ['picard', 'picard']},
        {'algorithms': ['jade']},
        {'algorithms': [{'algorithm_id': 'picard', 'params': {'tol': -1}}]},
        {'bins': 1},
        {'tolerances': [1e-4, 1e-2]},
        {'metrics': ['dipolarity']},
        {'datasets': []},
        {'datasets': [{'id': 'x', 'path': 'missing.icab'}]},
        {'fit_options': {'grid_spacing': -3}},
    ])
    def test_invalid(self, write_config, small_grid, change):
        """
        @TEST:BENCH-CFG-003
        Each invalid change is a BENCH-001 error
        """
        from bench.domain import BenchConfig
        from core.exceptions import ConfigValidationError

        path = write_config({**small_grid, **change})
        with pytest.raises(ConfigValidationError) as exc:
            BenchConfig.load(path)
        assert exc.value.code == 'BENCH-001'

    def test_csv_dataset_needs_srate(self, write_config, small_grid, tmp_path):
        """
        @TEST:BENCH-CFG-004
        """
        from bench.domain import BenchConfig
        from core.exceptions import ConfigValidationError

        (tmp_path / 'rec.csv').write_text('A,B\n1,2\n3,4\n')
        with pytest.raises(ConfigValidationError):
            BenchConfig.load(write_config({**small_grid, 'datasets': ['rec.csv']}))
        cfg = BenchConfig.load(write_config({**small_grid, 'datasets': [{'path': 'rec.csv', 'srate': 100}]}))
        assert cfg.datasets[0].id == 'rec'

    def test_import_needs_matrix(self, write_config, small_grid):
        """
        @TEST:BENCH-CFG-005
        """
        from bench.domain import BenchConfig
        from core.exceptions import ConfigValidationError

        with pytest.raises(ConfigValidationError):
            BenchConfig.load(write_config({**small_grid, 'algorithms': ['import']}))

    def test_not_an_object(self, tmp_path):
        """
        @TEST:BENCH-CFG-006
        """
        from bench.domain import BenchConfig
        from core.exceptions import ConfigValidationError

        path = tmp_path / 'list.json'
        path.write_text('[1, 2]')
        with pytest.raises(ConfigValidationError):
            BenchConfig.load(path)
