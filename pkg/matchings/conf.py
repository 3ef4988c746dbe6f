"""
Access to the ``HYPERMATCH`` settings dict with built-in defaults.

The library is usable without a configured Django project; in that case
the defaults below apply.
"""

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

DEFAULTS = {
    'COUNT_BUDGET': 10 ** 8,
    'COUNT_MEMOIZE': False,
    'WALKTREE_MAX_NODES': 10 ** 6,
    'PRECISION_BITS': 128,
    'RATIONAL_SWITCH_BITS': 2 ** 16,
    'FLOAT_PRECISION_BITS': 256,
    'TOWER_MAX_BITS': 2 ** 16,
    'CONSTRUCTION_MAX_VERTICES': 2 * 10 ** 6,
    'GLAUBER_BATCHES': 20,
}


def get_setting(name):
    """Return ``settings.HYPERMATCH[name]``, or the default when unset."""
    if name not in DEFAULTS:
        raise KeyError(f"Unknown hypermatch setting: {name}")
    try:
        overrides = getattr(settings, 'HYPERMATCH', {})
    except ImproperlyConfigured:
        overrides = {}
    return overrides.get(name, DEFAULTS[name])


def resolve(value, name):
    """Return ``value`` unless it is None, in which case the configured default."""
    return get_setting(name) if value is None else value
