"""
Django management command to run benchmark grids, tolerance sweeps and timing
"""

from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from bench.domain import TOLERANCE_FIELDS, BenchConfig
from bench.services.history import record_report, record_sweep, record_timing
from bench.services.runner import REPORT_NAME, SWEEP_NAME, TIMING_NAME, run_benchmark, time_algorithms, \
    tolerance_sweep
from core.cli import add_common_arguments, resolve_threads, translate_errors
from mir.services.reduction import ChannelEntropyCache


class Command(BaseCommand):
    help = 'Run the algorithm x dataset benchmark, a stopping-tolerance sweep or timing'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='action', required=True)

        run = subparsers.add_parser('run', help='Evaluate every algorithm on every dataset')
        add_common_arguments(run, config=True)

        sweep = subparsers.add_parser('sweep-tolerance', help='MIR across stopping tolerances')
        add_common_arguments(sweep, config=True)
        sweep.add_argument('--algorithm', choices=sorted(TOLERANCE_FIELDS), default=None,
                           help='Swept algorithm (config sweep_algorithm by default)')
        sweep.add_argument('--tolerances', type=float, nargs='+', default=None,
                           help='Strictly descending tolerances')

        time = subparsers.add_parser('time', help='Wall-clock time per algorithm and dataset')
        add_common_arguments(time, config=True)
        time.add_argument('--repetitions', type=int, default=None)

    @translate_errors
    def handle(self, *args, **options):
        cfg = BenchConfig.load(
            options['config'],
            bins=options['bins'],
            binning=options['binning'],
            seed=options['seed'],
            output_dir=options['out'],
        )
        action = options['action'].replace('-', '_')
        getattr(self, f'_{action}')(cfg, options)

    def _run(self, cfg, options):
        threads = resolve_threads(options['threads'])
        report = run_benchmark(cfg, threads=threads, cache=ChannelEntropyCache())
        path = Path(cfg.output_dir) / REPORT_NAME
        record_report(report, path)

        for cell in report.failed_cells:
            self.stdout.write(self.style.WARNING(
                f"{cell['algorithm']} / {cell['dataset']}: [{cell['error_code']}] {cell['message']}"))
        failed = len(report.failed_cells)
        if failed:
            raise CommandError(f'{failed} of {report.n_cells} cells failed; report written to {path}',
                               returncode=1)
        self.stdout.write(self.style.SUCCESS(f'{report.n_cells} cells -> {path}'))

    def _sweep_tolerance(self, cfg, options):
        threads = resolve_threads(options['threads'])
        table = tolerance_sweep(cfg, algorithm_id=options['algorithm'], tolerances=options['tolerances'],
                                threads=threads, cache=ChannelEntropyCache())
        path = Path(cfg.output_dir) / f'{SWEEP_NAME}.json'
        record_sweep(table, path)

        for mean in table['means']:
            if mean['mean'] is None:
                self.stdout.write(self.style.WARNING(f"tol={mean['tolerance']:g}: every dataset failed"))
        self.stdout.write(self.style.SUCCESS(
            f"{table['algorithm_id']} over {len(table['tolerances'])} tolerances -> {path}"))

    def _time(self, cfg, options):
        table = time_algorithms(cfg, repetitions=options['repetitions'], cache=ChannelEntropyCache())
        path = Path(cfg.output_dir) / f'{TIMING_NAME}.json'
        record_timing(table, cfg.seed, path)

        for row in table['rows']:
            if row['success']:
                self.stdout.write(
                    f"{row['algorithm']} / {row['dataset']}: {row['decomposition_mean_sec']:.3f} s "
                    f"(+- {row['decomposition_std_sec']:.3f})")
            else:
                self.stdout.write(self.style.WARNING(
                    f"{row['algorithm']} / {row['dataset']}: [{row['error_code']}] {row['message']}"))
        self.stdout.write(self.style.SUCCESS(f"Timing over {table['repetitions']} repetitions -> {path}"))
