"""Numba acceleration switch.

The hot decoding kernels in ``_kernels.py`` are written as plain Python
loops over numpy arrays.  By default they are compiled with numba's
``@njit``.  Setting the environment variable ``MIMO3D_DISABLE_NUMBA=1``
(before import) keeps them as interpreted Python, which is much slower
but bit-identical -- the compiled and interpreted paths share the same
source.  ``benchmarks/bench_kernels.py`` compares both.
"""

import os

_TRUTHY = ("1", "true", "yes", "on")

NUMBA_DISABLED = os.environ.get("MIMO3D_DISABLE_NUMBA", "").strip().lower() in _TRUTHY

if not NUMBA_DISABLED:
    try:
        from numba import njit as _njit
        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a hard dep, but stay usable
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False


def maybe_jit(fn):
    """Compile ``fn`` with numba unless acceleration is disabled."""
    if NUMBA_ENABLED:
        return _njit(cache=True)(fn)
    return fn
