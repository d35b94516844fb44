"""Numba switch.

Set ``WAVESCOPE_DISABLE_NUMBA=1`` to run every hot kernel through its
pure-numpy/Python fallback. The flag is read once, at import time.
"""

import os

_FALSY = ("", "0", "false", "no", "off")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
DISABLED_BY_ENV = os.environ.get("WAVESCOPE_DISABLE_NUMBA", "0").strip().lower() not in _FALSY
USE_NUMBA = NUMBA_AVAILABLE and not DISABLED_BY_ENV

_kwd = {"cache": True, "fastmath": False, "nogil": True}


def njit(func):
    """Compile ``func`` in nopython mode, or return None without numba.

    Callers keep the plain Python function around as the fallback, so this
    never silently swaps one for the other.
    """
    if not NUMBA_AVAILABLE:
        return None
    return numba.njit(**_kwd)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
