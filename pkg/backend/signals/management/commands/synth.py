"""
Django management command to synthesize a ground-truth mixture
"""

from pathlib import Path

from django.core.management.base import BaseCommand

from core.cli import add_common_arguments, translate_errors
from core.conf import icabench_settings
from core.io_utils import read_json
from signals.domain import MIXING_KINDS, SOURCE_KINDS, SynthSpec
from signals.services.dataset_io import save_dataset
from signals.services.synthesis import save_ground_truth, synth_dataset


class Command(BaseCommand):
    help = 'Generate a synthetic dataset with its mixing matrix and sources'

    def add_arguments(self, parser):
        parser.add_argument('--spec', default=None, help='JSON file with a SynthSpec; flags override it')
        parser.add_argument('--n-sources', type=int, default=None)
        parser.add_argument('--n-samples', type=int, default=None)
        parser.add_argument('--source-kinds', nargs='+', choices=SOURCE_KINDS, default=None)
        parser.add_argument('--mixing', choices=MIXING_KINDS, default=None)
        parser.add_argument('--noise-db', type=float, default=None)
        parser.add_argument('--srate', type=float, default=None)
        parser.add_argument('--id', dest='dataset_id', default=None, help='Dataset identifier')
        parser.add_argument('--format', choices=('binary', 'csv'), default='binary',
                            help='Dataset file format')
        add_common_arguments(parser)

    @translate_errors
    def handle(self, *args, **options):
        spec = read_json(options['spec']) if options['spec'] else {}
        flags = {
            'n_sources': options['n_sources'],
            'n_samples': options['n_samples'],
            'source_kinds': options['source_kinds'],
            'mixing': options['mixing'],
            'noise_db': options['noise_db'],
            'srate': options['srate'],
            'seed': options['seed'],
            'dataset_id': options['dataset_id'],
        }
        spec.update({key: value for key, value in flags.items() if value is not None})
        spec = SynthSpec.from_dict(spec)

        dataset, ground_truth = synth_dataset(spec)
        out_dir = Path(options['out'] or icabench_settings.OUTPUT_DIR)
        suffix = '.icab' if options['format'] == 'binary' else '.csv'
        data_path = save_dataset(dataset, out_dir / f'{dataset.id}{suffix}', format=options['format'])
        save_ground_truth(ground_truth, out_dir, dataset.id, srate=dataset.srate)

        if not spec.identifiable:
            self.stdout.write(self.style.WARNING(
                'More than one Gaussian source: the mixture is not identifiable by ICA'))
        self.stdout.write(self.style.SUCCESS(
            f'Synthesized {dataset.id} ({dataset.n_channels} x {dataset.n_samples}) -> {data_path}'))
