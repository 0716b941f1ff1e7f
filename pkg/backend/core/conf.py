"""
Access to the ICABENCH settings dictionary with defaults.

Usage:
    from core.conf import icabench_settings
    bins = icabench_settings.DEFAULT_BINS
"""

from django.conf import settings


DEFAULTS = {
    'DEFAULT_BINS': 128,
    'DEFAULT_BINNING': 'equal-width',
    'THREADS': 1,
    'OUTPUT_DIR': 'results',
    'ND_THRESHOLDS': [round(k / 100.0, 2) for k in range(1, 41)],
    'SERIES_MAX_DEGREE': 100,
    'SERIES_TOL': 1e-12,
    'SERIES_FAIL_TOL': 1e-6,
    'GRID_SPACING_MM': 8.0,
    'SEARCH_FRACTION': 0.95,
    'SURROGATES': 100,
    'TIMING_REPETITIONS': 5,
}


class IcaBenchSettings:
    """Lazy view over settings.ICABENCH falling back to DEFAULTS."""

    def __init__(self, defaults=None):
        self.defaults = defaults or DEFAULTS

    @property
    def user_settings(self):
        if not settings.configured:
            return {}
        return getattr(settings, 'ICABENCH', {})

    def __getattr__(self, attr):
        if attr not in self.defaults:
            raise AttributeError(f"Invalid ICABENCH setting: '{attr}'")
        return self.user_settings.get(attr, self.defaults[attr])


icabench_settings = IcaBenchSettings(DEFAULTS)
