"""Fourier primitives: a direct DFT used as the permanent test oracle and
an iterative radix-2 FFT used everywhere else."""

import cmath

import numpy as np

from . import _backend
from .errors import NonFiniteInputError, NotPowerOfTwoError
from .window import is_power_of_two

if _backend.USE_NUMBA:
    from . import _kernels_numba as _K
else:
    from . import _kernels_numpy as _K


def dft_direct(x, n=None):
    """Literal O(n^2) DFT, negative exponent, no normalization.

    Deliberately naive; kept as the oracle the fast transform is checked
    against, so do not optimize it.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1:
        raise ValueError("dft_direct expects a 1-D sequence")
    if n is None:
        n = x.shape[0]
    if n < 1:
        raise ValueError(f"transform length must be >= 1, got {n}")
    xs = np.zeros(n, np.complex128)
    m = min(n, x.shape[0])
    xs[:m] = x[:m]
    out = np.empty(n, np.complex128)
    for f in range(n):
        acc = 0.0 + 0.0j
        for k in range(n):
            acc += complex(xs[k]) * cmath.exp(-2j * cmath.pi * k * f / n)
        out[f] = acc
    return out


def _validated(x):
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1:
        raise ValueError("expected a 1-D sequence")
    if not is_power_of_two(x.shape[0]):
        raise NotPowerOfTwoError(f"length {x.shape[0]} is not a power of two")
    if not np.all(np.isfinite(x.real)) or not np.all(np.isfinite(x.imag)):
        raise NonFiniteInputError("non-finite values at transform boundary")
    return x


def fft_radix2(x):
    """Iterative radix-2 FFT (bit-reversal permutation, then butterflies).

    Matches ``dft_direct`` to roundoff for every power-of-two length.
    """
    return _K.fft1(_validated(x))


def fft_batch(a):
    """Transform each row of a (rows, n) complex matrix; n a power of two."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if not is_power_of_two(a.shape[1]):
        raise NotPowerOfTwoError(f"row length {a.shape[1]} is not a power of two")
    return _K.fft_batch(a)
