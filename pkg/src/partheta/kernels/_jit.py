"""Backend switch read once at import time from ``PARTHETA_BACKEND``."""

import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

NUMBA_AVAILABLE = numba is not None


def _resolve(name):
    name = (name or "").strip().lower()
    if not name:
        return "numba" if NUMBA_AVAILABLE else "numpy"
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown PARTHETA_BACKEND {name!r}; expected 'numba' or 'numpy'")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise ImportError("PARTHETA_BACKEND=numba but numba is not installed")
    return name


BACKEND = _resolve(os.environ.get("PARTHETA_BACKEND"))

if BACKEND == "numba":
    jit = numba.njit(cache=True)
else:

    def jit(func):
        return func
