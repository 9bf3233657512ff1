"""Numba switch.

Set ``NODALCOUNT_DISABLE_NUMBA=1`` to force the pure-numpy kernels, e.g. when
numba is unavailable or to cross-check results.
"""

import os

_DISABLED = os.environ.get("NODALCOUNT_DISABLE_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
    "on",
}

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

HAVE_NUMBA = _numba is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(func):
    """Compile ``func`` with ``numba.njit(cache=True)`` when numba is present.

    The decorated object is always returned, compiled or not, so both kernel
    families stay importable and testable side by side.
    """
    if not HAVE_NUMBA:
        return func
    return _numba.njit(cache=True, nogil=True)(func)
