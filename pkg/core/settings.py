"""
Django settings for the TDCGAN speech enhancement project.

The project has no public HTTP surface: the admin site is kept for browsing the
run ledger, everything else is driven through `manage.py` commands of the
`enhancer` app.
"""

import os
from pathlib import Path
from dotenv import load_dotenv
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


SECRET_KEY = os.getenv('SECRET_KEY', 'tdcgan-local-development-key')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = [host for host in os.getenv('ALLOWED_HOSTS', 'localhost,127.0.0.1').split(',') if host]

# Application definition

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',

    'rest_framework',

    'enhancer',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'core.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]


# Database
# sqlite by default so a desk setup needs nothing running; point the env at
# postgres for a shared run ledger.

DATABASES_ENGINE = os.getenv('DATABASES_ENGINE', 'django.db.backends.sqlite3')

if DATABASES_ENGINE.endswith('sqlite3'):
    DATABASES = {
        'default': {
            'ENGINE': DATABASES_ENGINE,
            'NAME': os.getenv('DATABASES_NAME', str(BASE_DIR / 'db.sqlite3')),
        }
    }
else:
    DATABASES = {
        'default': {
            'ENGINE': DATABASES_ENGINE,
            'NAME': os.getenv('DATABASES_NAME', 'tdcgan_runs'),
            'USER': os.getenv('DATABASES_USER', 'tdcgan'),
            'PASSWORD': os.getenv('DATABASES_PASSWORD', ''),
            'HOST': os.getenv('DATABASES_HOST', 'localhost'),
            'PORT': os.getenv('DATABASES_PORT', '5432'),
        }
    }


# Engine settings
TDCGAN = {
    'DEFAULT_CONFIG': Path(os.getenv('TDCGAN_DEFAULT_CONFIG', BASE_DIR / 'config' / 'defaults.yaml')),
    # any NaN/Inf in a loss or gradient aborts the step
    'CHECK_NONFINITE': os.getenv('TDCGAN_CHECK_NONFINITE', 'True') == 'True',
    'WORKERS': int(os.getenv('TDCGAN_WORKERS', '1')),
    'TOOL_VERSION': '1.0.0',
}


# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name} {message}',
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
        'enhancer': {
            'handlers': ['console'],
            'level': os.getenv('TDCGAN_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}


LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


STATIC_ROOT = BASE_DIR / 'staticfiles'
STATIC_URL = '/static/'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
