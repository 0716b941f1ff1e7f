"""
Django management command to plot reports and list the run history
"""

from pathlib import Path

from django.core.management.base import BaseCommand

from bench.domain import BenchReport
from bench.models import BenchRun
from bench.services.history import list_runs
from bench.services.plots import PLOT_KINDS, emit_plots
from bench.services.statistics import threshold_sweep
from core.cli import translate_errors
from core.exceptions import MissingMetricError
from core.io_utils import atomic_write_text, read_json


class Command(BaseCommand):
    help = 'Emit figures and regression tables from benchmark reports, or list past runs'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='action', required=True)

        plot = subparsers.add_parser('plot', help='Write SVG figures with the plotted values as CSV')
        plot.add_argument('--report', default=None, help='report.json of bench run')
        plot.add_argument('--kind', choices=PLOT_KINDS + ('all',), default='all')
        plot.add_argument('--sweep', default=None, help='tolerance_sweep.json of bench sweep-tolerance')
        plot.add_argument('--timing', default=None, help='timing.json of bench time')
        plot.add_argument('--nd-threshold', type=float, default=0.05,
                          help='rv threshold of the nd-vs-mir figure')
        plot.add_argument('--out', default=None, help='Output directory (report directory by default)')

        sweep = subparsers.add_parser('threshold-sweep', help='Regress ND% on MIR per rv threshold')
        sweep.add_argument('--report', required=True)
        sweep.add_argument('--thresholds', type=float, nargs='+', default=None)
        sweep.add_argument('--out', default=None, help='CSV path')

        history = subparsers.add_parser('history', help='List recorded bench invocations')
        history.add_argument('--kind', choices=[choice for choice, _ in BenchRun.KIND_CHOICES], default=None)
        history.add_argument('--limit', type=int, default=20)

    @translate_errors
    def handle(self, *args, **options):
        action = options['action'].replace('-', '_')
        getattr(self, f'_{action}')(options)

    def _default_out(self, options):
        if options['out']:
            return Path(options['out'])
        source = options.get('report') or options.get('sweep') or options.get('timing')
        return Path(source).resolve().parent if source else Path('.')

    def _plot(self, options):
        report = BenchReport.load(options['report']) if options['report'] else None
        sweep = read_json(options['sweep']) if options['sweep'] else None
        timing = read_json(options['timing']) if options['timing'] else None
        out_dir = self._default_out(options)

        kinds = PLOT_KINDS if options['kind'] == 'all' else (options['kind'],)
        written = []
        for kind in kinds:
            try:
                written += emit_plots(report, kind, out_dir, sweep=sweep, timing=timing,
                                      nd_threshold=options['nd_threshold'])
            except MissingMetricError:
                if options['kind'] != 'all':
                    raise
                self.stdout.write(self.style.WARNING(f'Skipped {kind}: inputs not available'))
        self.stdout.write(self.style.SUCCESS(f'Wrote {len(written)} files to {out_dir}'))

    def _threshold_sweep(self, options):
        report = BenchReport.load(options['report'])
        frame = threshold_sweep(report, options['thresholds'])
        path = Path(options['out']) if options['out'] else \
            Path(options['report']).resolve().parent / 'threshold_sweep.csv'
        atomic_write_text(path, frame.to_csv(index=False, float_format='%.17g'))

        degenerate = [c for c in frame.columns if c.startswith('degenerate_') and frame[c].any()]
        for column in degenerate:
            self.stdout.write(self.style.WARNING(
                f"{column.replace('degenerate_', '')}: degenerate regression at some thresholds"))
        self.stdout.write(self.style.SUCCESS(f'{len(frame)} thresholds -> {path}'))

    def _history(self, options):
        runs = list_runs(options['kind'], options['limit'])
        if not runs:
            self.stdout.write('No recorded runs')
            return
        for run in runs:
            self.stdout.write(
                f'{run.created_at:%Y-%m-%d %H:%M:%S}  {run.kind:<16} {run.status:<8} '
                f'{run.n_failed}/{run.n_cells} failed  {run.config_digest[:12]}  {run.report_path}')
