"""
Django settings for the hypermatch project.

hypermatch has no web surface and no database; Django provides the
configuration layer, logging setup and the management-command CLI.
Settings are organized by category for better maintainability.
"""

import os
from pathlib import Path
from django.core.exceptions import ImproperlyConfigured

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


def get_env_variable(var_name, default=None):
    """Get environment variable or return default value."""
    try:
        return os.environ[var_name]
    except KeyError:
        if default is not None:
            return default
        error_msg = f"Set the {var_name} environment variable"
        raise ImproperlyConfigured(error_msg)


def get_int_env_variable(var_name, default):
    """Get an integer environment variable, rejecting malformed values."""
    raw = get_env_variable(var_name, str(default))
    try:
        value = int(raw)
    except ValueError:
        raise ImproperlyConfigured(f"{var_name} must be an integer, got {raw!r}")
    if value <= 0:
        raise ImproperlyConfigured(f"{var_name} must be positive, got {value}")
    return value


# Application definition

INSTALLED_APPS = [
    # The matchings app holds the whole library and its management commands
    'matchings',
]

# No persistence: every result is a pure function of its inputs.
DATABASES = {}

USE_TZ = True


# Library configuration
HYPERMATCH = {
    'COUNT_BUDGET': get_int_env_variable('HYPERMATCH_BUDGET', 10 ** 8),
    'COUNT_MEMOIZE': get_env_variable('HYPERMATCH_MEMOIZE', '0').lower() in ('1', 'true'),
    'WALKTREE_MAX_NODES': 10 ** 6,
    'PRECISION_BITS': 128,
    'RATIONAL_SWITCH_BITS': 2 ** 16,
    'FLOAT_PRECISION_BITS': 256,
    'TOWER_MAX_BITS': 2 ** 16,
    'CONSTRUCTION_MAX_VERTICES': 2 * 10 ** 6,
    'GLAUBER_BATCHES': 20,
}


# Logging configuration
# Console logging goes to stderr so JSON on stdout stays machine-readable.
# File logging is opt-in through HYPERMATCH_LOG_FILE.
LOG_FILE = os.environ.get('HYPERMATCH_LOG_FILE', '').strip()
LOG_LEVEL = get_env_variable('HYPERMATCH_LOG_LEVEL', 'WARNING').upper()

if LOG_FILE:
    try:
        os.makedirs(Path(LOG_FILE).resolve().parent, exist_ok=True)
    except Exception:
        # If we can't create the directory, fall back to console-only
        LOG_FILE = ''

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
        **({
            'file': {
                'level': 'INFO',
                'class': 'logging.FileHandler',
                'filename': LOG_FILE,
                'formatter': 'verbose',
            }
        } if LOG_FILE else {})
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'matchings': {
            'handlers': ['console'] + (['file'] if LOG_FILE else []),
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}
