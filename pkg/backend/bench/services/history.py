"""
Run history: one BenchRun row per bench invocation.
"""

import logging

from bench.models import BenchRun

logger = logging.getLogger(__name__)


def run_status(n_cells: int, n_failed: int) -> str:
    if n_failed == 0:
        return BenchRun.STATUS_SUCCESS
    if n_failed >= n_cells:
        return BenchRun.STATUS_FAILED
    return BenchRun.STATUS_PARTIAL


def record_run(kind: str, config_digest: str, seed: int, n_cells: int, n_failed: int,
               report_path: str = '', summary: dict = None) -> BenchRun:
    """Persist one invocation; status is derived from the failure count."""
    run = BenchRun.objects.create(
        kind=kind,
        config_digest=config_digest,
        seed=seed,
        status=run_status(n_cells, n_failed),
        n_cells=n_cells,
        n_failed=n_failed,
        report_path=str(report_path or ''),
        summary=summary or {},
    )
    logger.info('Recorded %s', run)
    return run


def record_report(report, report_path='') -> BenchRun:
    return record_run(
        BenchRun.KIND_RUN,
        report.provenance['config_digest'],
        report.provenance['seed'],
        report.n_cells,
        len(report.failed_cells),
        report_path,
        report.summary,
    )


def record_sweep(table: dict, report_path='') -> BenchRun:
    rows = table['rows']
    return record_run(
        BenchRun.KIND_SWEEP,
        table['provenance']['config_digest'],
        table['provenance']['seed'],
        len(rows),
        sum(1 for row in rows if not row['success']),
        report_path,
        {'algorithm_id': table['algorithm_id'], 'means': table['means'], 'references': table['references']},
    )


def record_timing(table: dict, seed: int, report_path='') -> BenchRun:
    rows = table['rows']
    means = {f"{row['algorithm']}/{row['dataset']}": row['decomposition_mean_sec']
             for row in rows if row['success']}
    return record_run(
        BenchRun.KIND_TIME,
        table['config_digest'],
        seed,
        len(rows),
        sum(1 for row in rows if not row['success']),
        report_path,
        {'repetitions': table['repetitions'], 'decomposition_mean_sec': means},
    )


def list_runs(kind: str = None, limit: int = 20):
    runs = BenchRun.objects.all()
    if kind:
        runs = runs.filter(kind=kind)
    return list(runs[:limit])
