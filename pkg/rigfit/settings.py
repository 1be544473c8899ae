"""
Django settings for the rigfit project.

The project is driven from the command line (``python manage.py <command>``);
the only HTTP surface is the read-only run registry under ``/api/``.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv(os.path.join(BASE_DIR, '.env'))


def env_flag(name, default=False):
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in ('1', 'true', 'yes', 'on')


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('SECRET_KEY', 'rigfit-insecure-development-key')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = env_flag('DEBUG')

ALLOWED_HOSTS = ['*']

# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'fitting',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.middleware.common.CommonMiddleware',
]

ROOT_URLCONF = 'rigfit.urls'


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': ['rest_framework.renderers.JSONRenderer'],
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': ['rest_framework.permissions.AllowAny'],
    'UNAUTHENTICATED_USER': None,
}


# Logging
# https://docs.djangoproject.com/en/5.2/topics/logging/

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'fitting': {
            'handlers': ['console'],
            'level': os.getenv('RIGFIT_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}


# Fitting defaults. Library modules never read these; commands pass them on.

RIGFIT_OUTPUT_DIR = Path(os.getenv('RIGFIT_OUTPUT_DIR', BASE_DIR / 'runs'))

RIGFIT_THREADS = int(os.getenv('RIGFIT_THREADS', '1'))

RIGFIT_CHECK_DESCENT = env_flag('RIGFIT_CHECK_DESCENT', DEBUG)

RIGFIT = {
    'ALPHA_GRID': (0.0, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0),
    'SIGMA2_GRID': (0.0, 0.01, 0.02, 0.03, 0.05, 0.1),
    'PASSES_GRID': (1, 5),
    'SIGMA2': 0.03,
    'COMPARISON_ALPHA': 0.5,
    'DEGENERATE_NORM': 1e-12,
    'PINV_CUTOFF': 1e-10,
    'CORRECTION_SCALE': 0.1,
}
