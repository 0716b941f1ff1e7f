"""
Django management command to evaluate one decomposition: MIR, PMI or dipolarity
"""

from pathlib import Path

import numpy as np
from django.core.management.base import BaseCommand

from core.cli import add_common_arguments, resolve_bins, resolve_binning, resolve_threads, translate_errors
from core.conf import icabench_settings
from core.io_utils import atomic_write_text, write_json
from decompositions.domain import Decomposition
from decompositions.services.matrix_io import import_decomposition
from dipfit.domain import FitOptions, HeadModel
from dipfit.services.dipolarity import dipolarity, raw_data_dipolarity
from dipfit.services.montage_io import cap_montage, load_head_model, load_montage
from infometrics.services.pmi import pmi_matrix
from mir.services.reduction import ChannelEntropyCache, mir, remnant_pmi
from signals.services.dataset_io import load_dataset


class Command(BaseCommand):
    help = 'Compute MIR, pairwise PMI or dipolarity of a dataset and an unmixing matrix'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='metric', required=True)

        for name, help_text in (('mir', 'Mutual information reduction of W'),
                                ('pmi', 'Pairwise mutual information matrix'),
                                ('dipolarity', 'Dipole fits of the scalp maps of W')):
            sub = subparsers.add_parser(name, help=help_text)
            sub.add_argument('dataset', help='Dataset file (.icab or .csv)')
            sub.add_argument('--matrix', required=(name != 'pmi'), default=None,
                             help='Unmixing matrix file (n x n)')
            sub.add_argument('--srate', type=float, default=None, help='Sampling rate for CSV datasets')
            add_common_arguments(sub)
            if name == 'dipolarity':
                sub.add_argument('--montage', default=None, help='Electrode CSV (label,x_mm,y_mm,z_mm)')
                sub.add_argument('--head-model', default=None, help='Head model JSON')
                sub.add_argument('--exclude', nargs='*', default=(), help='Electrode labels to drop')
                sub.add_argument('--raw', action='store_true',
                                 help='Also fit randomly chosen raw time-point maps')

    @translate_errors
    def handle(self, *args, **options):
        dataset = load_dataset(options['dataset'], srate=options['srate'])
        bins = resolve_bins(options['bins'])
        binning = resolve_binning(options['binning'])
        threads = resolve_threads(options['threads'])
        out_dir = Path(options['out'] or icabench_settings.OUTPUT_DIR)
        dec = import_decomposition(options['matrix'], dataset) if options['matrix'] else None

        handler = getattr(self, f"_{options['metric']}")
        handler(dataset, dec, bins, binning, threads, out_dir, options)

    def _mir(self, dataset, dec, bins, binning, threads, out_dir, options):
        report = mir(dataset, dec.W, bins, binning, cache=ChannelEntropyCache(), algorithm_id='import')
        path = write_json(out_dir / f'{dataset.id}.mir.json', report.to_dict())
        self.stdout.write(self.style.SUCCESS(
            f'MIR {dataset.id}: {report.mir_bits_per_sample:.4f} bits/sample '
            f'({report.mir_kbits_per_sec:.4f} Kbits/s) -> {path}'))

    def _pmi(self, dataset, dec, bins, binning, threads, out_dir, options):
        if dec is None:
            matrix = pmi_matrix(dataset.centered(), bins, binning, threads=threads, labels=dataset.labels)
            stem = f'{dataset.id}.pmi'
        else:
            matrix = pmi_matrix(dec.W @ dataset.centered(), bins, binning, threads=threads)
            stem = f'{dataset.id}.components.pmi'
        csv_path = matrix.to_csv(out_dir / f'{stem}.csv')
        matrix.to_json(out_dir / f'{stem}.json')
        message = f'Mean PMI {dataset.id}: {matrix.mean():.6f} bits -> {csv_path}'
        if dec is not None:
            remnant = remnant_pmi(dataset, dec.W, bins, binning, cache=ChannelEntropyCache(), threads=threads)
            write_json(out_dir / f'{dataset.id}.remnant_pmi.json', remnant.to_dict())
            message += f' (remnant {remnant.percent:.2f}%)'
        self.stdout.write(self.style.SUCCESS(message))

    def _dipolarity(self, dataset, dec: Decomposition, bins, binning, threads, out_dir, options):
        head = load_head_model(options['head_model']) if options['head_model'] else HeadModel.default()
        if options['montage']:
            montage = load_montage(options['montage'], exclude=options['exclude'])
        else:
            montage = cap_montage(dataset.n_channels, radius=head.outer_radius)
        thresholds = icabench_settings.ND_THRESHOLDS
        opts = FitOptions()

        report = dipolarity(dec, montage, head, thresholds, opts, threads)
        path = write_json(out_dir / f'{dataset.id}.dipolarity.json', report.to_dict())
        curve = report.curve_frame('components')
        if options['raw']:
            seed = options['seed'] if options['seed'] is not None else 0
            baseline = raw_data_dipolarity(dataset, montage, head, seed=seed, thresholds=thresholds,
                                           opts=opts, threads=threads)
            write_json(out_dir / f'{dataset.id}.raw_dipolarity.json', baseline.to_dict())
            curve['raw_data'] = baseline.curve_frame('raw_data')['raw_data'].to_numpy()
        atomic_write_text(out_dir / f'{dataset.id}.dipolarity.csv', curve.to_csv(index=False))

        for index in report.failed_components:
            self.stdout.write(self.style.WARNING(f'Component {index}: dipole fit failed'))
        self.stdout.write(self.style.SUCCESS(
            f'Dipolarity {dataset.id}: ND at 5% = {report.nd_percent(0.05):.1f}%, '
            f'median rv = {np.nanmedian(np.asarray(report.rv, dtype=float)):.4f} -> {path}'))
