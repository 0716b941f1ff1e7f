"""
Helpers shared by the management commands.

Common flags: --config, --bins, --binning, --seed, --threads, --out.
"""

import functools
import os

from django.core.management.base import CommandError

from core.conf import icabench_settings
from core.exceptions import IcaBenchError

BINNING_CHOICES = ('equal-width', 'equal-occupancy')
THREADS_ENV = 'ICABENCH_THREADS'


def add_common_arguments(parser, config=False):
    """Register the flags every subcommand accepts."""
    if config:
        parser.add_argument('--config', required=True, help='Path to a JSON config file')
    parser.add_argument('--bins', type=int, default=None,
                        help='Histogram bin count (default from settings)')
    parser.add_argument('--binning', choices=BINNING_CHOICES, default=None,
                        help='Histogram edge strategy')
    parser.add_argument('--seed', type=int, default=None, help='Random seed')
    parser.add_argument('--threads', type=int, default=None, help='Parallelism degree')
    parser.add_argument('--out', default=None, help='Output path or directory')


def resolve_threads(value=None) -> int:
    """ICABENCH_THREADS wins over the --threads flag, which wins over settings."""
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            threads = int(env)
        except ValueError as e:
            raise CommandError(f'{THREADS_ENV} must be an integer, got {env!r}') from e
    elif value is not None:
        threads = int(value)
    else:
        threads = int(icabench_settings.THREADS)
    if threads < 1:
        raise CommandError(f'Thread count must be >= 1, got {threads}')
    return threads


def resolve_bins(value=None) -> int:
    return int(value) if value is not None else int(icabench_settings.DEFAULT_BINS)


def resolve_binning(value=None) -> str:
    return value or icabench_settings.DEFAULT_BINNING


def translate_errors(handler):
    """Turn IcaBenchError raised by a command handler into CommandError."""
    @functools.wraps(handler)
    def wrapper(*args, **kwargs):
        try:
            return handler(*args, **kwargs)
        except IcaBenchError as e:
            raise CommandError(f'[{e.code}] {e.detail}') from e
    return wrapper
