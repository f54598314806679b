from pathlib import Path
import os
from dotenv import load_dotenv

load_dotenv("../.env")

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# No request handling happens here; the key only keeps Django's checks quiet.
SECRET_KEY = os.environ.get(
    'DJANGO_SECRET_KEY',
    'frontwaves-insecure-local-key'
)

DEBUG = os.environ.get(
    'DJANGO_DEBUG'
) != 'False'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'fronts.apps.FrontsConfig',
    'phasemaps.apps.PhasemapsConfig',
    'runs.apps.RunsConfig',
    'rest_framework',
]

# Nothing is persisted; runs write CSV/JSON files instead.
DATABASES = {}

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


def _env_float(name, default):
    return float(os.environ.get(name, default))


# Numerical defaults. Kernels take explicit arguments; these only seed
# QuadratureSettings and the regime thresholds used at the command boundary.
FRONTWAVES = {
    'REL_TOL': _env_float('FRONTWAVES_REL_TOL', 1e-9),
    'ABS_TOL': _env_float('FRONTWAVES_ABS_TOL', 1e-14),
    'MAX_SUBDIVISIONS': int(os.environ.get('FRONTWAVES_MAX_SUBDIVISIONS', 400)),
    'PV_WINDOW': _env_float('FRONTWAVES_PV_WINDOW', 0.05),
    'BAND_RATIO_LIMIT': _env_float('FRONTWAVES_BAND_RATIO_LIMIT', 0.5),
    'BAND_TAU_LIMIT': _env_float('FRONTWAVES_BAND_TAU_LIMIT', 0.05),
    'BAND_SWITCH_BAND': _env_float('FRONTWAVES_BAND_SWITCH_BAND', 3.0),
    'TAIL_SHORT_RATIO': _env_float('FRONTWAVES_TAIL_SHORT_RATIO', 0.2),
    'TAIL_LONG_RATIO': _env_float('FRONTWAVES_TAIL_LONG_RATIO', 5.0),
    'CSV_SCHEMA_VERSION': '1',
    'DEFAULT_JOBS': int(os.environ.get('FRONTWAVES_JOBS', 1)),
}


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'frontwaves': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'frontwaves',
        },
    },
    'loggers': {
        name: {
            'handlers': ['console'],
            'level': os.environ.get('FRONTWAVES_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        }
        for name in ('fronts', 'phasemaps', 'runs')
    },
}
