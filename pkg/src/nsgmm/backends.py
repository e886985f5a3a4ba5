"""Kernel backend selection.

The hot numeric loops (the 1-D breakpoint scan and the 2-D arrangement
sweep) exist twice: a numba @njit implementation and a pure-numpy
fallback.  The active backend is chosen per call from the environment:

    NSGMM_BACKEND=auto    numba if importable, else numpy (default)
    NSGMM_BACKEND=numba   force numba, raise if unavailable
    NSGMM_BACKEND=numpy   force the pure-numpy path

``benchmarks/backend_bench.py`` times the two against each other.
"""

from __future__ import annotations

import os

_ENV_VAR = "NSGMM_BACKEND"
_VALID = ("auto", "numba", "numpy")


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except Exception:
        return False
    return True


_HAVE_NUMBA = _numba_available()


def backend_name() -> str:
    """Resolve the backend for the current call ('numba' or 'numpy')."""
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if choice not in _VALID:
        raise ValueError(
            f"{_ENV_VAR} must be one of {_VALID}, got {choice!r}"
        )
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not _HAVE_NUMBA:
            raise RuntimeError(f"{_ENV_VAR}=numba but numba is not importable")
        return "numba"
    return "numba" if _HAVE_NUMBA else "numpy"
