"""
Django settings for the diracosc project.

Проект не поднимает веб-сервер: Django используется как каркас для
management-команд, конфигурации и тестов.
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure-default-key-for-dev')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',

    # Third-party apps
    'rest_framework',

    # Local apps
    'oscillator',
    'oracles',
    'reports',
]

# Расчёты не хранят состояние, база данных не нужна
DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

USE_I18N = False

USE_TZ = True

TIME_ZONE = 'UTC'


# Logging
# Таблицы пишутся в stdout, поэтому логи уходят только в stderr

LOG_LEVEL = os.getenv('LOG_LEVEL', 'WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '%(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': LOG_LEVEL,
    },
}


# REST Framework Configuration
# Сериализаторы используются только для валидации и вывода строк таблиц
REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [],
    'UNAUTHENTICATED_USER': None,
    'COMPACT_JSON': True,
    'STRICT_JSON': True,
}


# Dirac oscillator Configuration
DIRAC_DEFAULTS = {
    'units': os.getenv('DIRAC_UNITS', 'natural'),
    'm0': float(os.getenv('DIRAC_M0', '1.0')),
    'omega': float(os.getenv('DIRAC_OMEGA', '1.0')),
    'c': float(os.getenv('DIRAC_C', '1.0')),
    'hbar': float(os.getenv('DIRAC_HBAR', '1.0')),
    'e_abs': float(os.getenv('DIRAC_E_ABS', '1.0')),
    'b_field': 0.0,
    'theta': 0.0,
    'thetabar': 0.0,
    'beta': 0.0,
    'n_max': 10,
    'm_quantum': 1,
    'branch': 'both',
    'grid_n': int(os.getenv('DIRAC_GRID_N', '4000')),
    'p_max': float(os.getenv('DIRAC_P_MAX', '12.0')),
    'format': 'csv',
    'out': None,
    'tolerance': float(os.getenv('DIRAC_TOLERANCE', '1e-4')),
    'sweep_param': 'beta',
    'sweep_start': 0.0,
    'sweep_stop': 0.1,
    'sweep_steps': 11,
}

DIRAC_OUTPUT_DIGITS = int(os.getenv('DIRAC_OUTPUT_DIGITS', '9'))  # Значащих цифр в таблицах
DIRAC_VERIFY_BETA = float(os.getenv('DIRAC_VERIFY_BETA', '0.04'))  # β для Pöschl-Teller оракула при beta=0
DIRAC_ORACLE_COUNT = int(os.getenv('DIRAC_ORACLE_COUNT', '5'))  # Сколько уровней проверяет каждый оракул
DIRAC_GOLDEN_DIR = Path(os.getenv('DIRAC_GOLDEN_DIR', str(BASE_DIR / 'reports' / 'golden')))
