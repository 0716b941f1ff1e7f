"""
Django settings for the icabench project.

The project has no web surface: Django provides settings, the
management-command CLI and the ORM used for the run history.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'icabench-local-only')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    # Local apps
    'core',
    'signals',
    'infometrics',
    'mir',
    'decompositions',
    'dipfit',
    'bench',
]


# Database
# Run history only; SQLite is enough.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.getenv('ICABENCH_DB_PATH', str(BASE_DIR / 'db.sqlite3')),
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

USE_TZ = True

TIME_ZONE = 'UTC'


# Logging
# https://docs.djangoproject.com/en/5.0/topics/logging/

LOG_LEVEL = os.getenv('ICABENCH_LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '%(asctime)s %(levelname)s %(name)s %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False}
        for app in ('signals', 'infometrics', 'mir', 'decompositions', 'dipfit', 'bench')
    },
}


# Workbench settings
# Every key can be overridden with an ICABENCH_<KEY> environment variable.

def _env(name, default, cast=str):
    value = os.getenv(f'ICABENCH_{name}')
    return default if value is None else cast(value)


ICABENCH = {
    # Histogram estimators
    'DEFAULT_BINS': _env('DEFAULT_BINS', 128, int),
    'DEFAULT_BINNING': _env('DEFAULT_BINNING', 'equal-width'),
    'SURROGATES': _env('SURROGATES', 100, int),

    # Execution
    'THREADS': _env('THREADS', 1, int),
    'OUTPUT_DIR': _env('OUTPUT_DIR', str(BASE_DIR / 'results')),
    'TIMING_REPETITIONS': _env('TIMING_REPETITIONS', 5, int),

    # Dipole fitting
    'ND_THRESHOLDS': [round(k / 100.0, 2) for k in range(1, 41)],
    'SERIES_MAX_DEGREE': _env('SERIES_MAX_DEGREE', 100, int),
    'SERIES_TOL': _env('SERIES_TOL', 1e-12, float),
    'SERIES_FAIL_TOL': _env('SERIES_FAIL_TOL', 1e-6, float),
    'GRID_SPACING_MM': _env('GRID_SPACING_MM', 8.0, float),
    'SEARCH_FRACTION': _env('SEARCH_FRACTION', 0.95, float),
}
