"""
Django settings for ramsey_project project.

The project has no web surface: it hosts the ramsey_search app, whose
management commands (search, resume, verify, count) are the command line,
and keeps its run records in a local database.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""
import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get(
    'RAMSEY_SECRET_KEY',
    'django-insecure-3k#q9v!w0rz)8m2b@x7t$ue4h6y^n1c(pj5sfd-a=lg*oi+kr',
)

DEBUG = os.environ.get('RAMSEY_DEBUG', '') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'ramsey_search',
]


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# #######################################################################################

RAMSEY_SETTINGS = {
    # Defaults for every run-file key the file leaves out
    'TRAINER_DEFAULTS': {
        'batch_size': 400,
        'learn_pct': 0.10,
        'survive_pct': 0.02,
        'epsilon_initial': 0.0,
        'epsilon_step': 0.05,
        'epsilon_max': 0.5,
        'stagnation_window': 50,
        'max_batches': 10000,
        'seed': 0,
        'hidden': [128, 64],
        'learning_rate': 1e-3,
        'train_steps': 1,
        'checkpoint_every': 100,
        'restarts': 0,
    },
    'OUTPUT_DIR': BASE_DIR / 'runs',
    'WORKERS_ENV': 'RAMSEY_CEMA_WORKERS',
    # Episodes per rollout task; fixed so results do not depend on --workers
    'ROLLOUT_CHUNK': 64,
    'RECORD_RUNS': True,
}

# Logging configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'INFO',
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
        'file': {
            'level': 'DEBUG',
            'class': 'logging.FileHandler',
            'filename': BASE_DIR / 'ramsey_search.log',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'ramsey_search': {
            'handlers': ['console', 'file'],
            'level': os.environ.get('RAMSEY_LOG_LEVEL', 'INFO'),
            'propagate': True,
        },
    },
}
