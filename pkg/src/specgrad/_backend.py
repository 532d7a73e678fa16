"""Kernel backend selection.

The hot loops (radix-2 FFT, framed window transforms) exist twice: a
numba-compiled version and a vectorized pure-numpy version.  The active
one is picked once at import time from the SPECGRAD_BACKEND environment
variable:

    auto   use numba when importable, numpy otherwise (default)
    numba  require numba, fail loudly if it cannot be imported
    numpy  force the pure-numpy path

``benchmarks/bench_backends.py`` times the two against each other.
"""

import os

_ENV_VAR = "SPECGRAD_BACKEND"
_requested = os.environ.get(_ENV_VAR, "auto").strip().lower()

if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"{_ENV_VAR} must be one of 'auto', 'numba', 'numpy'; got {_requested!r}"
    )

if _requested == "numpy":
    USE_NUMBA = False
else:
    try:
        import numba  # noqa: F401

        USE_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise
        USE_NUMBA = False

BACKEND_NAME = "numba" if USE_NUMBA else "numpy"


def active_backend():
    """Name of the kernel backend selected at import time."""
    return BACKEND_NAME
