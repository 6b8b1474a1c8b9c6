"""Kernel backend selection.

Hot numeric kernels are compiled with numba when it is available. Setting the
environment variable ``CR_DISABLE_NUMBA=1`` (or numba failing to import)
selects the pure-numpy implementations instead. The choice is made once at
import time and exposed as ``BACKEND``.
"""

import os

_TRUTHY = {"1", "true", "yes", "on"}


def _numba_disabled() -> bool:
    return os.environ.get("CR_DISABLE_NUMBA", "").strip().lower() in _TRUTHY


NUMBA_ENABLED = False
if not _numba_disabled():
    try:
        from numba import njit as _njit  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    from numba import njit
else:

    def njit(*args, **kwargs):
        """No-op stand-in for numba.njit when running on the numpy backend."""

        def wrap(func):
            return func

        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return wrap


BACKEND = "numba" if NUMBA_ENABLED else "numpy"
