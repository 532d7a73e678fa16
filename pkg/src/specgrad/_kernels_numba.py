"""Numba-compiled hot kernels.

Mirrors the public surface of ``_kernels_numpy``; both are exercised by
the parity tests and the backend benchmark.  The taper formulas here are
scalar clones of the vectorized ones in ``window`` (numba wants scalar
code in the per-frame loop).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _bit_reverse_inplace(a):
    n = a.shape[0]
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            tmp = a[i]
            a[i] = a[j]
            a[j] = tmp


@njit(cache=True)
def _fft_inplace(a, tw):
    """Iterative radix-2 decimation-in-time transform.

    ``tw`` is caller-provided twiddle scratch of length >= n // 2.
    """
    n = a.shape[0]
    if n <= 1:
        return
    _bit_reverse_inplace(a)
    size = 2
    while size <= n:
        half = size >> 1
        ang = -2.0 * np.pi / size
        for k in range(half):
            tw[k] = complex(np.cos(ang * k), np.sin(ang * k))
        for start in range(0, n, size):
            for k in range(half):
                u = a[start + k]
                v = a[start + k + half] * tw[k]
                a[start + k] = u + v
                a[start + k + half] = u - v
        size <<= 1


@njit(cache=True)
def fft1(x):
    out = x.copy()
    tw = np.empty(out.shape[0] // 2 + 1, np.complex128)
    _fft_inplace(out, tw)
    return out


@njit(cache=True)
def fft_batch(a):
    out = a.copy()
    tw = np.empty(a.shape[1] // 2 + 1, np.complex128)
    for i in range(a.shape[0]):
        _fft_inplace(out[i], tw)
    return out


@njit(cache=True)
def _taper_value(x, theta):
    if x < 0.0 or x > theta:
        return 0.0
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * x / theta)


@njit(cache=True)
def _taper_dtheta(x, theta):
    if x <= 0.0 or x >= theta:
        return 0.0
    return -(np.pi * x / (theta * theta)) * np.sin(2.0 * np.pi * x / theta)


@njit(cache=True)
def _taper_dx(x, theta):
    if x <= 0.0 or x >= theta:
        return 0.0
    return (np.pi / theta) * np.sin(2.0 * np.pi * x / theta)


@njit(cache=True)
def framed_transform(signal, starts, window):
    """Row i = FFT(window * signal[starts[i] : starts[i]+n]), zero padded."""
    t = starts.shape[0]
    n = window.shape[0]
    m = signal.shape[0]
    out = np.zeros((t, n), np.complex128)
    tw = np.empty(n // 2 + 1, np.complex128)
    for i in range(t):
        b = starts[i]
        lo = 0 if b >= 0 else -b
        hi = n if b + n <= m else m - b
        for k in range(lo, hi):
            out[i, k] = window[k] * signal[b + k]
        _fft_inplace(out[i], tw)
    return out


@njit(cache=True)
def shifted_transform(signal, starts, shifts, theta, n, grad_mode, dx_coeff):
    """Per-frame shifted taper, then FFT of each row.

    grad_mode False: taper value at (k - shifts[i]) + (theta - n + 1)/2.
    grad_mode True: full theta-derivative of that taper, where the frame
    position moves with theta at rate dx_coeff[i] (so the positional
    derivative enters with weight 0.5 - dx_coeff[i]; the 0.5 comes from
    the support recentering).
    """
    t = starts.shape[0]
    m = signal.shape[0]
    out = np.zeros((t, n), np.complex128)
    tw = np.empty(n // 2 + 1, np.complex128)
    c = 0.5 * (theta - n + 1.0)
    for i in range(t):
        b = starts[i]
        sh = shifts[i]
        for k in range(n):
            idx = b + k
            if idx < 0 or idx >= m:
                continue
            x = (k - sh) + c
            if grad_mode:
                w = (0.5 - dx_coeff[i]) * _taper_dx(x, theta) + _taper_dtheta(x, theta)
            else:
                w = _taper_value(x, theta)
            out[i, k] = w * signal[idx]
        _fft_inplace(out[i], tw)
    return out
