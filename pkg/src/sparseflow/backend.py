"""Kernel backend selection.

The hot inner loops (top-k correlation search, motion-tensor encoding) ship
in two interchangeable implementations: numba-jitted loops and pure numpy.
The ``SPARSEFLOW_BACKEND`` environment variable, read once at import time,
picks the default:

    auto    use numba when importable, numpy otherwise (default)
    numba   require numba; import fails loudly if it is missing
    numpy   force the pure-numpy fallback

Every dispatching function also accepts a per-call ``backend=`` override so
the benchmark harness can time both paths in one process.
"""

from __future__ import annotations

import os

ENV_VAR = "SPARSEFLOW_BACKEND"
_CHOICES = ("auto", "numba", "numpy")


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _resolve() -> str:
    choice = os.environ.get(ENV_VAR, "auto").strip().lower()
    if choice not in _CHOICES:
        raise ValueError(
            f"{ENV_VAR} must be one of {_CHOICES}, got {choice!r}"
        )
    if choice == "numpy":
        return "numpy"
    if _numba_available():
        return "numba"
    if choice == "numba":
        raise ImportError(f"{ENV_VAR}=numba but numba is not importable")
    return "numpy"


ACTIVE_BACKEND = _resolve()


def active_backend() -> str:
    """Name of the backend selected at import time ('numba' or 'numpy')."""
    return ACTIVE_BACKEND


def kernels(backend: str | None = None):
    """Return the kernel module for `backend` (default: the active one)."""
    choice = backend or ACTIVE_BACKEND
    if choice == "numba":
        from . import _kernels_numba

        return _kernels_numba
    if choice == "numpy":
        from . import _kernels_numpy

        return _kernels_numpy
    raise ValueError(f"unknown backend {choice!r} (expected 'numba' or 'numpy')")
