"""Numba switch for the hot kernels.

Set ``WHMIN_DISABLE_NUMBA=1`` to run every kernel through its pure
numpy/Python path (useful for debugging and for the kernel benchmark).
"""

import os

_FALSY = {"", "0", "false", "no", "off"}

NUMBA_ENABLED = os.environ.get("WHMIN_DISABLE_NUMBA", "").strip().lower() in _FALSY

if NUMBA_ENABLED:
    try:
        import numba
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False


def jit(fn=None, *, fallback=None):
    """Compile ``fn`` with ``numba.njit`` or return the python path.

    ``fallback`` is an optional vectorised numpy implementation used in
    place of ``fn`` when numba is disabled.
    """

    def wrap(f):
        if NUMBA_ENABLED:
            return numba.njit(cache=True, nogil=True)(f)
        return fallback if fallback is not None else f

    if fn is None:
        return wrap
    return wrap(fn)


def python_path(kernel):
    """Return the uncompiled python function behind ``kernel``."""
    return getattr(kernel, "py_func", kernel)
