"""
Django settings for tphase_project project.

Only the parts of Django the command-line tools need are enabled: settings,
management commands, forms and logging. There is no database and no web
surface.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Not used for anything security relevant; Django refuses to start without it.
SECRET_KEY = os.environ.get('TPHASE_SECRET_KEY', 'tphase-local-only')

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'tphase_core',
]

# No models are defined, so no database is configured.
DATABASES = {}


# Internationalization
# https://docs.djangoproject.com/en/4.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Logging
# https://docs.djangoproject.com/en/4.2/topics/logging/

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'tphase_core': {
            'handlers': ['console'],
            'level': os.environ.get('TPHASE_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}


# Numerical tolerances and sweep defaults
# Any key left out falls back to tphase_core.conf.DEFAULTS.

TPHASE = {
    'PD_TOL': 1e-10,
    'PHASE_ZERO_TOL': 1e-10,
    'RANK_TOL': 1e-9,
    'INVERSE_TOL': 1e-12,
    'THETA_GRID_POINTS': 720,
    'FREQ_POINTS': 400,
    'FREQ_MIN': 1e-3,
    'FREQ_MAX': 1e3,
    'COMPETITOR_SAMPLES': 1000,
    'COMPETITOR_GRID_POINTS': 90,
}
