"""
Tests for the benchmark harness

@TEST:BENCH-RUN
"""

import json

import numpy as np
import pytest


@pytest.mark.integration
class TestRunBenchmark:
    """Algorithm x dataset grids."""

    def test_grid(self, write_config, small_grid):
        """
        @TEST:BENCH-RUN-001
        ICA reduces more information than PCA, identity reduces none
        """
        from bench.domain import BenchConfig
        from bench.services.runner import run_benchmark

        cfg = BenchConfig.load(write_config(small_grid))
        report = run_benchmark(cfg, write=False)

        assert report.n_cells == 6
        assert report.failed_cells == ()
        assert [(c['algorithm'], c['dataset']) for c in report.cells] == [
            ('picard', 'lap-a'), ('picard', 'lap-b'), ('pca', 'lap-a'), ('pca', 'lap-b'),
            ('identity', 'lap-a'), ('identity', 'lap-b')]
        for dataset in ('lap-a', 'lap-b'):
            picard = report.cell('picard', dataset)
            pca = report.cell('pca', dataset)
            identity = report.cell('identity', dataset)
            assert picard['mir']['mir_bits_per_sample'] > pca['mir']['mir_bits_per_sample']
            assert identity['mir']['mir_bits_per_sample'] == 0.0
            assert identity['remnant_pmi']['percent'] == 100.0
            assert picard['amari_index'] < 0.1
            assert 'wall_time_sec' not in picard['decomposition']
        assert report.ordering['by_dataset']['lap-a'][0] == 'picard'
        assert report.ordering['order_preserved'] is True
        assert report.summary['picard']['n_datasets'] == 2
        assert report.provenance['config_digest'] == cfg.digest()
        assert report.provenance['algorithm_params']['picard']['params']['seed'] == 5

    def test_deterministic(self, write_config, small_grid):
        """
        @TEST:BENCH-RUN-002
        Same config and seed give identical metric sections at any thread count
        """
        from bench.domain import BenchConfig
        from bench.services.runner import run_benchmark
        from core.io_utils import dumps

        cfg = BenchConfig.load(write_config(small_grid))
        serial = run_benchmark(cfg, threads=1, write=False)
        parallel = run_benchmark(cfg, threads=3, write=False)
        assert dumps(serial.metric_sections()) == dumps(parallel.metric_sections())

    def test_writes_artifacts(self, write_config, small_grid, tmp_path):
        """
        @TEST:BENCH-RUN-003
        report.json plus summary tables
        """
        import openpyxl

        from bench.domain import BenchConfig, BenchReport
        from bench.services.runner import run_benchmark

        cfg = BenchConfig.load(write_config(small_grid))
        report = run_benchmark(cfg)
        out = tmp_path / 'results'
        loaded = BenchReport.load(out / 'report.json')
        assert loaded.n_cells == report.n_cells
        assert json.loads((out / 'report.json').read_text())['provenance']['bins'] == 32
        assert (out / 'summary.csv').exists()
        assert (out / 'cells.csv').exists()
        workbook = openpyxl.load_workbook(out / 'summary.xlsx')
        assert workbook.sheetnames == ['Summary', 'Cells']

    def test_failed_cell_is_isolated(self, write_config, small_grid, tmp_path):
        """
        @TEST:BENCH-RUN-004
        A wrong-sized imported matrix fails its cells only
        """
        from bench.domain import BenchConfig
        from bench.services.runner import run_benchmark

        (tmp_path / 'W.csv').write_text('1,0\n0,1\n')
        payload = {**small_grid, 'algorithms': ['pca', {'algorithm_id': 'import', 'matrix': 'W.csv'}]}
        report = run_benchmark(BenchConfig.load(write_config(payload)), write=False)

        failed = report.failed_cells
        assert len(failed) == 2
        assert {cell['error_code'] for cell in failed} == {'SIG-003'}
        assert all(cell['algorithm'] == 'import' for cell in failed)
        assert report.summary['import']['n_failed'] == 2
        assert report.summary['pca']['n_datasets'] == 2

    def test_dipolar_grid(self, write_config):
        """
        @TEST:BENCH-RUN-005
        On dipolar sources ICA maps are more dipolar than PCA maps
        """
        from bench.domain import BenchConfig
        from bench.services.runner import run_benchmark
        from bench.services.summary import nd_percent

        payload = {
            'datasets': [{'id': 'dip', 'synth': {'n_sources': 12, 'n_samples': 5000,
                                                 'mixing': 'dipolar', 'seed': 4}}],
            'algorithms': ['picard', 'pca'],
            'metrics': ['mir', 'dipolarity'],
            'bins': 32,
            'raw_baseline': True,
            'nd_thresholds': [0.05, 0.10],
            'fit_options': {'grid_spacing': 12.0, 'max_refine_iter': 200},
        }
        report = run_benchmark(BenchConfig.load(write_config(payload)), write=False)
        picard = report.cell('picard', 'dip')['dipolarity']
        pca = report.cell('pca', 'dip')['dipolarity']
        assert nd_percent(picard, 0.05) >= nd_percent(pca, 0.05)
        assert nd_percent(picard, 0.10) >= 50.0
        assert report.baselines['dip']['success'] is True
        assert len(report.baselines['dip']['dipolarity']['rv']) == 71
        assert [p['threshold'] for p in report.summary['picard']['nd_percent']] == [0.05, 0.10]


@pytest.mark.integration
class TestSweepAndTiming:
    """Tolerance sweeps and wall-clock timing."""

    def test_tolerance_sweep(self, write_config, small_grid, tmp_path):
        """
        @TEST:BENCH-RUN-006
        One row per tolerance and dataset, other algorithms as references
        """
        from bench.domain import BenchConfig
        from bench.services.runner import tolerance_sweep

        cfg = BenchConfig.load(write_config(small_grid))
        table = tolerance_sweep(cfg, tolerances=(1e-2, 1e-6))
        assert table['algorithm_id'] == 'picard'
        assert table['tolerance_field'] == 'tol'
        assert len(table['rows']) == 4
        assert [m['tolerance'] for m in table['means']] == [1e-2, 1e-6]
        assert set(table['references']) == {'pca', 'identity'}
        assert table['references']['identity']['mean'] == 0.0
        assert all(row['success'] for row in table['rows'])
        assert (tmp_path / 'results' / 'tolerance_sweep.csv').exists()

    def test_tolerance_plateau(self, write_config, small_grid):
        """
        @TEST:BENCH-RUN-009
        MIR rises as the tolerance tightens and levels off below 1e-6
        """
        from bench.domain import BenchConfig
        from bench.services.runner import tolerance_sweep

        tolerances = (1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-8)
        payload = {**small_grid, 'algorithms': ['picard'], 'metrics': ['mir']}
        table = tolerance_sweep(BenchConfig.load(write_config(payload)), tolerances=tolerances, write=False)
        means = {m['tolerance']: m['mean'] for m in table['means']}

        for loose, tight in zip(tolerances, tolerances[1:]):
            assert means[tight] >= means[loose] - 0.01
        assert means[1e-6] - means[1e-3] < 0.05
        assert means[1e-8] == pytest.approx(means[1e-6], rel=1e-3)

    def test_sweep_rejects_unsweepable(self, write_config, small_grid):
        """
        @TEST:BENCH-RUN-007
        """
        from bench.domain import BenchConfig
        from bench.services.runner import tolerance_sweep
        from core.exceptions import ConfigValidationError

        cfg = BenchConfig.load(write_config(small_grid))
        with pytest.raises(ConfigValidationError):
            tolerance_sweep(cfg, algorithm_id='pca', write=False)
        with pytest.raises(ConfigValidationError):
            tolerance_sweep(cfg, tolerances=(1e-4, 1e-2), write=False)

    def test_time_algorithms(self, write_config, small_grid):
        """
        @TEST:BENCH-RUN-008
        """
        from bench.domain import BenchConfig
        from bench.services.runner import time_algorithms

        payload = {**small_grid, 'algorithms': ['pca', 'fastica']}
        table = time_algorithms(BenchConfig.load(write_config(payload)), repetitions=2, write=False)
        assert len(table['rows']) == 4
        for row in table['rows']:
            assert row['success']
            assert len(row['decomposition_sec']) == 2
            assert row['decomposition_mean_sec'] == pytest.approx(np.mean(row['decomposition_sec']))
        assert table['threads'] == 1
        assert 'cpu_count' in table['host']


@pytest.mark.slow
class TestLikelihoodParity:
    """Picard and Infomax optimize the same likelihood."""

    def test_picard_matches_infomax(self):
        """
        @TEST:BENCH-RUN-010
        Ten mixtures: MIR agrees within 0.5%, both beat PCA, unmixing matrices agree
        """
        from decompositions.services.evaluation import pairwise_amari
        from decompositions.services.registry import run_decomposition
        from mir.services.reduction import ChannelEntropyCache, mir
        from signals.domain import SynthSpec
        from signals.services.synthesis import synth_dataset

        cache = ChannelEntropyCache()
        for seed in range(1, 11):
            dataset, _ = synth_dataset(SynthSpec(n_sources=4, n_samples=20000, seed=seed))
            W = {
                'picard': run_decomposition('picard', dataset).W,
                'infomax': run_decomposition('infomax', dataset, {'w_change': 1e-7, 'max_iter': 2000}).W,
                'pca': run_decomposition('pca', dataset).W,
            }
            bits = {name: mir(dataset, w, cache=cache).mir_bits_per_sample for name, w in W.items()}

            assert abs(bits['picard'] - bits['infomax']) < 0.005 * abs(bits['infomax'])
            assert bits['picard'] > bits['pca'] and bits['infomax'] > bits['pca']
            assert pairwise_amari(W['picard'], W['infomax']) < 0.1
