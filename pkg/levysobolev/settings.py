"""
Django settings for the levysobolev project.

The project has no web surface and no database: it is a numerical library of
Django apps driven through ``manage.py levysobolev``.
"""

from pathlib import Path
from decouple import config


# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY', default='levysobolev-local-only')

DEBUG = config('DEBUG', 'False').lower() == 'true'
ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'rest_framework',

    'symbol_core',
    'levy_measure',
    'index_lab',
    'spectral_solver',
    'cli',
]

DATABASES = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [],
    'UNAUTHENTICATED_USER': None,
    'COERCE_DECIMAL_TO_STRING': False,
}


# Worker cap for the direction sweep of the index fits.
LEVYSOBOLEV_THREADS = max(config('LEVYSOBOLEV_THREADS', default=1, cast=int), 1)

# Single defaults table; echoed into the header of every output file.
LEVYSOBOLEV_DEFAULTS = {
    'grid_r_min': 1e2,
    'grid_r_max': 1e6,
    'grid_points_per_decade': 16,
    'grid_directions': 32,
    'index_tol': 0.05,
    'subpolynomial_slope': 0.1,
    'quadrature_eps': 1e-4,
    'quadrature_tol': 1e-9,
    'bg_fit_x_min': 1e-6,
    'bg_fit_x_max': 1e-2,
    'bg_fit_points': 64,
    'gamma_r_min': 1e-6,
    'gamma_r_max': 1e-1,
    'solver_modes': 4096,
    'solver_cutoff': 64.0,
    'form_trials': 500,
    'tail_tol': 1e-8,
    'moment_tail_tol': 1e-8,
}


LOG_LEVEL = config('LOG_LEVEL', default='WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': LOG_LEVEL,
    },
}
