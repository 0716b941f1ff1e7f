"""
Django management command to run one decomposition on a dataset
"""

from dataclasses import fields
from pathlib import Path

from django.core.management.base import BaseCommand

from core.cli import add_common_arguments, translate_errors
from core.conf import icabench_settings
from core.io_utils import read_json, write_json
from decompositions.services.matrix_io import export_decomposition
from decompositions.services.registry import ALGORITHMS, resolve_params, run_decomposition
from signals.services.dataset_io import load_dataset


class Command(BaseCommand):
    help = 'Decompose a dataset and write the unmixing matrix and fit summary'

    def add_arguments(self, parser):
        parser.add_argument('dataset', help='Dataset file (.icab or .csv)')
        parser.add_argument('--algorithm', required=True, choices=sorted(ALGORITHMS))
        parser.add_argument('--params', default=None, help='JSON file with algorithm parameters')
        parser.add_argument('--matrix', default=None, help='Unmixing matrix file for --algorithm import')
        parser.add_argument('--srate', type=float, default=None, help='Sampling rate for CSV datasets')
        parser.add_argument('--format', choices=('csv', 'binary'), default='csv',
                            help='Output matrix format')
        add_common_arguments(parser)

    @translate_errors
    def handle(self, *args, **options):
        algorithm_id = options['algorithm']
        dataset = load_dataset(options['dataset'], srate=options['srate'])
        params = read_json(options['params']) if options['params'] else {}

        # --seed only applies to algorithms with a seed
        seeded = {f.name for f in fields(ALGORITHMS[algorithm_id].params_class)}
        if options['seed'] is not None and 'seed' in seeded:
            params['seed'] = options['seed']
        params = resolve_params(algorithm_id, params)

        dec = run_decomposition(algorithm_id, dataset, params, path=options['matrix'])

        out_dir = Path(options['out'] or icabench_settings.OUTPUT_DIR)
        stem = out_dir / f'{dataset.id}.{algorithm_id}'
        suffix = '.W.csv' if options['format'] == 'csv' else '.W.icab'
        matrix_path = export_decomposition(dec, f'{stem}{suffix}', format=options['format'])
        write_json(f'{stem}.json', {
            'dataset_id': dataset.id,
            'params': params.to_dict(),
            'decomposition': dec.to_dict(),
            'trace': dec.trace,
        })

        if not dec.converged:
            for warning in dec.warnings:
                self.stdout.write(self.style.WARNING(warning))
        self.stdout.write(self.style.SUCCESS(
            f'{algorithm_id} on {dataset.id}: {dec.iterations_used} iterations, '
            f'{dec.wall_time_sec:.2f} s -> {matrix_path}'))
