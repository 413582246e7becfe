"""Kernel acceleration switch.

Hot kernels are written once and decorated with :func:`njit`.  By default
they are compiled with numba (``nopython``, ``nogil``, on-disk cache).
Setting the environment variable ``WWMC_DISABLE_NUMBA=1`` before import
selects a pure-numpy fallback in which the same source runs interpreted.
Both paths produce bit-identical results; the fallback is 1-2 orders of
magnitude slower and exists for debugging and for machines without a
working numba toolchain.
"""

import os

NUMBA_ENABLED = os.environ.get("WWMC_DISABLE_NUMBA", "0").lower() not in (
    "1",
    "true",
    "yes",
)

if NUMBA_ENABLED:
    try:
        import numba as _numba
    except ImportError:  # pragma: no cover - numba is a hard dependency
        NUMBA_ENABLED = False

if NUMBA_ENABLED:

    def njit(func=None, **kwargs):
        kwargs.setdefault("cache", True)
        kwargs.setdefault("nogil", True)
        if func is None:
            return _numba.njit(**kwargs)
        return _numba.njit(**kwargs)(func)

else:

    def njit(func=None, **kwargs):
        if func is None:
            return lambda f: f
        return func


# Histories are dispatched in fixed-size slices so that tally reduction
# order (and therefore every output bit) is independent of worker count.
CHUNK_HISTORIES = 8192
