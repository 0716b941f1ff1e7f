"""
Benchmark harness: algorithm x dataset grids, tolerance sweeps and timing.

Every cell is isolated: a failing fit becomes an error record and the rest
of the grid still runs. Cells may run in a thread pool; results are merged
in config order, so the report does not depend on scheduling.

@CODE:BENCH-RUN
"""

import logging
import os
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd
import scipy
from django.utils import timezone

from bench.domain import TOLERANCE_FIELDS, AlgorithmEntry, BenchConfig, BenchReport
from bench.services.config import head_model, load_datasets, montage_for
from bench.services.export import export_summary
from bench.services.summary import algorithm_ordering, describe, summarize
from core.exceptions import ConfigValidationError, ErrorCodes, IcaBenchError
from core.io_utils import atomic_write_text, write_json
from decompositions.services.evaluation import amari_index
from decompositions.services.registry import resolve_params, run_decomposition
from dipfit.services.dipolarity import dipolarity, raw_data_dipolarity
from mir.services.reduction import ChannelEntropyCache, mir, remnant_pmi

logger = logging.getLogger(__name__)

REPORT_NAME = 'report.json'
SWEEP_NAME = 'tolerance_sweep'
TIMING_NAME = 'timing'


def _success_response(**payload) -> dict:
    return {'success': True, **payload}


def _error_response(error_code: str, message: str, **extra) -> dict:
    return {'success': False, 'error_code': error_code, 'message': message, **extra}


def _map(function, jobs, threads):
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(function, jobs))
    return [function(job) for job in jobs]


def host_descriptor() -> dict:
    return {
        'node': platform.node(),
        'machine': platform.machine(),
        'processor': platform.processor(),
        'cpu_count': os.cpu_count(),
        'python': platform.python_version(),
        'numpy': np.__version__,
        'scipy': scipy.__version__,
    }


class _Grid:
    """Shared state of one benchmark invocation."""

    def __init__(self, cfg: BenchConfig, cache: ChannelEntropyCache = None):
        self.cfg = cfg
        self.cache = cache or ChannelEntropyCache()
        self.loaded = load_datasets(cfg)
        self.head = head_model(cfg) if 'dipolarity' in cfg.metrics else None
        self.opts = cfg.fit_opts()

    def metrics(self, dec, loaded, algorithm_id):
        """Configured metrics of one decomposition as a dict of JSON-ready sections."""
        cfg, dataset = self.cfg, loaded.dataset
        out = {}
        if 'mir' in cfg.metrics:
            out['mir'] = mir(dataset, dec.W, cfg.bins, cfg.binning, cache=self.cache,
                             algorithm_id=algorithm_id).to_dict()
        if 'pmi' in cfg.metrics:
            out['remnant_pmi'] = remnant_pmi(dataset, dec.W, cfg.bins, cfg.binning, cache=self.cache).to_dict()
        if 'dipolarity' in cfg.metrics:
            montage = montage_for(cfg, dataset, self.head)
            out['dipolarity'] = dipolarity(dec, montage, self.head, cfg.nd_thresholds, self.opts).to_dict()
        ground_truth = loaded.ground_truth
        if ground_truth is not None and dec.W.shape == ground_truth.mixing_matrix.shape:
            out['amari_index'] = amari_index(dec.W, ground_truth.mixing_matrix)
        return out

    def cell(self, job):
        """Run one (algorithm, dataset) cell; returns (record, timing)."""
        entry, loaded, params = job
        key = {'algorithm': entry.label, 'dataset': loaded.source.id}
        timing = dict(key)
        if loaded.error is not None:
            return {**key, **loaded.error, 'stage': 'dataset'}, timing

        logger.info('Cell %s / %s started', entry.label, loaded.source.id)
        try:
            dec = run_decomposition(entry.algorithm_id, loaded.dataset, params, path=entry.matrix)
            timing['decomposition_sec'] = dec.wall_time_sec
            started = time.perf_counter()
            metrics = self.metrics(dec, loaded, entry.algorithm_id)
            timing['metrics_sec'] = time.perf_counter() - started
        except IcaBenchError as e:
            logger.warning('Cell %s / %s failed: [%s] %s', entry.label, loaded.source.id, e.code, e.detail)
            return {**key, **e.as_record()}, timing
        except Exception as e:
            logger.exception('Cell %s / %s failed unexpectedly', entry.label, loaded.source.id)
            return {**key, **_error_response(ErrorCodes.UNEXPECTED, f'{type(e).__name__}: {e}')}, timing

        decomposition = dec.to_dict()
        decomposition.pop('wall_time_sec')
        logger.info('Cell %s / %s finished (converged=%s)', entry.label, loaded.source.id, dec.converged)
        return _success_response(**key, decomposition=decomposition, **metrics), timing

    def baseline(self, loaded):
        try:
            montage = montage_for(self.cfg, loaded.dataset, self.head)
            report = raw_data_dipolarity(loaded.dataset, montage, self.head, seed=self.cfg.seed,
                                         thresholds=self.cfg.nd_thresholds, opts=self.opts)
            return _success_response(dipolarity=report.to_dict())
        except IcaBenchError as e:
            logger.warning('Raw-data dipolarity of %s failed: [%s] %s', loaded.source.id, e.code, e.detail)
            return e.as_record()


def _provenance(cfg: BenchConfig, threads: int) -> dict:
    return {
        'config_digest': cfg.digest(),
        'created_at': timezone.now().isoformat(),
        'seed': cfg.seed,
        'bins': cfg.bins,
        'binning': cfg.binning,
        'metrics': list(cfg.metrics),
        'nd_thresholds': list(cfg.nd_thresholds),
        'mean_removed': True,
        'algorithms': [entry.label for entry in cfg.algorithms],
        'datasets': [source.id for source in cfg.datasets],
        'algorithm_params': {
            entry.label: {
                'algorithm_id': entry.algorithm_id,
                'params': resolve_params(entry.algorithm_id, entry.params_with_seed(cfg.seed)).to_dict(),
            }
            for entry in cfg.algorithms
        },
        'threads': threads,
        'host': host_descriptor(),
    }


def run_benchmark(cfg: BenchConfig, threads: int = 1, cache: ChannelEntropyCache = None,
                  write: bool = True) -> BenchReport:
    """
    Run every (algorithm, dataset) cell and assemble the report.

    Args:
        cfg: Validated configuration
        threads: Cells evaluated in parallel
        cache: Channel entropy cache shared by all cells (fresh when None)
        write: Write report.json and the summary tables to cfg.output_dir

    Returns:
        BenchReport; failed cells carry error records
    """
    started = time.perf_counter()
    grid = _Grid(cfg, cache)
    jobs = [(entry, loaded, entry.params_with_seed(cfg.seed))
            for entry in cfg.algorithms for loaded in grid.loaded]
    results = _map(grid.cell, jobs, threads)

    cells = tuple(record for record, _ in results)
    labels = [entry.label for entry in cfg.algorithms]
    datasets = [source.id for source in cfg.datasets]

    baselines = {}
    if cfg.raw_baseline and 'dipolarity' in cfg.metrics:
        usable = [loaded for loaded in grid.loaded if loaded.dataset is not None]
        for loaded, record in zip(usable, _map(grid.baseline, usable, threads)):
            baselines[loaded.source.id] = record

    report = BenchReport(
        provenance=_provenance(cfg, threads),
        cells=cells,
        summary=summarize(cells, labels, cfg.nd_thresholds),
        ordering=algorithm_ordering(cells, labels, datasets) if 'mir' in cfg.metrics else {},
        timings={'cells': [timing for _, timing in results], 'total_sec': time.perf_counter() - started},
        baselines=baselines,
    )
    failed = len(report.failed_cells)
    logger.info('Benchmark finished: %d cells, %d failed', report.n_cells, failed)

    if write:
        out_dir = Path(cfg.output_dir)
        report.save(out_dir / REPORT_NAME)
        export_summary(report, out_dir)
    return report


def _check_tolerances(tolerances):
    tolerances = tuple(float(t) for t in tolerances)
    if not tolerances or any(not t > 0 for t in tolerances):
        raise ConfigValidationError('tolerances must be a non-empty list of positive values')
    if any(b >= a for a, b in zip(tolerances, tolerances[1:])):
        raise ConfigValidationError('tolerances must be strictly descending')
    return tolerances


def tolerance_sweep(cfg: BenchConfig, algorithm_id: str = None, tolerances=None, threads: int = 1,
                    cache: ChannelEntropyCache = None, write: bool = True) -> dict:
    """
    MIR of one algorithm across stopping tolerances.

    Every other configured algorithm is run once per dataset and reported
    as a reference line.

    Returns:
        {'algorithm_id', 'tolerance_field', 'tolerances', 'rows', 'means',
         'references', 'provenance'}; rows has |tolerances| x |datasets| entries
    """
    algorithm_id = algorithm_id or cfg.sweep_algorithm
    if algorithm_id not in TOLERANCE_FIELDS:
        raise ConfigValidationError(
            f'Cannot sweep {algorithm_id!r}; expected one of {sorted(TOLERANCE_FIELDS)}')
    tolerances = _check_tolerances(tolerances if tolerances is not None else cfg.tolerances)
    tol_field = TOLERANCE_FIELDS[algorithm_id]

    configured = [entry for entry in cfg.algorithms if entry.algorithm_id == algorithm_id]
    base = configured[0].params_with_seed(cfg.seed) if configured else \
        AlgorithmEntry(algorithm_id).params_with_seed(cfg.seed)
    swept = {entry.label for entry in configured[:1]}
    references = [entry for entry in cfg.algorithms if entry.label not in swept]

    sweep_cfg = cfg if 'mir' in cfg.metrics and len(cfg.metrics) == 1 else _mir_only(cfg)
    grid = _Grid(sweep_cfg, cache)

    jobs = [(AlgorithmEntry(algorithm_id, label=f'{algorithm_id}@{tol:g}'), loaded, {**base, tol_field: tol})
            for tol in tolerances for loaded in grid.loaded]
    jobs += [(entry, loaded, entry.params_with_seed(cfg.seed)) for entry in references for loaded in grid.loaded]
    results = [record for record, _ in _map(grid.cell, jobs, threads)]

    rows = []
    n_swept = len(tolerances) * len(grid.loaded)
    for (entry, loaded, params), record in zip(jobs[:n_swept], results[:n_swept]):
        row = {'tolerance': params[tol_field], 'dataset': loaded.source.id, 'success': record['success']}
        if record['success']:
            row.update(mir_bits_per_sample=record['mir']['mir_bits_per_sample'],
                       iterations=record['decomposition']['iterations_used'],
                       converged=record['decomposition']['converged'])
        else:
            row.update(error_code=record['error_code'], message=record['message'])
        rows.append(row)

    means = [{'tolerance': tol, **describe(row['mir_bits_per_sample'] for row in rows
                                           if row['tolerance'] == tol and row['success'])}
             for tol in tolerances]
    reference_lines = {}
    for entry in references:
        values = [record['mir']['mir_bits_per_sample'] for (e, _, _), record in zip(jobs[n_swept:], results[n_swept:])
                  if e.label == entry.label and record['success']]
        reference_lines[entry.label] = describe(values)

    table = {
        'algorithm_id': algorithm_id,
        'tolerance_field': tol_field,
        'tolerances': list(tolerances),
        'rows': rows,
        'means': means,
        'references': reference_lines,
        'provenance': _provenance(sweep_cfg, threads),
    }
    failed = sum(1 for row in rows if not row['success'])
    logger.info('Tolerance sweep of %s: %d rows, %d failed', algorithm_id, len(rows), failed)

    if write:
        out_dir = Path(cfg.output_dir)
        write_json(out_dir / f'{SWEEP_NAME}.json', table)
        atomic_write_text(out_dir / f'{SWEEP_NAME}.csv', pd.DataFrame(rows).to_csv(index=False))
    return table


def _mir_only(cfg: BenchConfig) -> BenchConfig:
    return replace(cfg, metrics=('mir',))


def time_algorithms(cfg: BenchConfig, repetitions: int = None, cache: ChannelEntropyCache = None,
                    write: bool = True) -> dict:
    """
    Wall-clock time per (algorithm, dataset) over repetitions, run serially.

    Decomposition time and metric time are measured separately.

    Returns:
        {'rows', 'repetitions', 'threads', 'host', 'config_digest'}
    """
    repetitions = int(repetitions or cfg.repetitions)
    if repetitions < 1:
        raise ConfigValidationError(f'repetitions must be >= 1, got {repetitions}')
    grid = _Grid(cfg, cache)

    rows = []
    for entry in cfg.algorithms:
        params = entry.params_with_seed(cfg.seed)
        for loaded in grid.loaded:
            row = {'algorithm': entry.label, 'dataset': loaded.source.id, 'repetitions': repetitions}
            decomposition_sec, metrics_sec = [], []
            for _ in range(repetitions):
                record, timing = grid.cell((entry, loaded, params))
                if not record['success']:
                    row.update(success=False, error_code=record['error_code'], message=record['message'])
                    break
                decomposition_sec.append(timing['decomposition_sec'])
                metrics_sec.append(timing['metrics_sec'])
            else:
                decomposition = describe(decomposition_sec)
                metrics = describe(metrics_sec)
                row.update(
                    success=True,
                    decomposition_sec=decomposition_sec,
                    metrics_sec=metrics_sec,
                    decomposition_mean_sec=decomposition['mean'],
                    decomposition_std_sec=decomposition['std'],
                    metrics_mean_sec=metrics['mean'],
                    metrics_std_sec=metrics['std'],
                )
            rows.append(row)
            logger.info('Timed %s / %s', entry.label, loaded.source.id)

    table = {
        'rows': rows,
        'repetitions': repetitions,
        'threads': 1,
        'host': host_descriptor(),
        'config_digest': cfg.digest(),
    }
    if write:
        out_dir = Path(cfg.output_dir)
        write_json(out_dir / f'{TIMING_NAME}.json', table)
        flat = [{k: v for k, v in row.items() if not isinstance(v, list)} for row in rows]
        atomic_write_text(out_dir / f'{TIMING_NAME}.csv', pd.DataFrame(flat).to_csv(index=False))
    return table
