"""Pure-numpy fallback kernels, same surface as ``_kernels_numba``.

Same radix-2 algorithm, vectorized across rows instead of jitted; taper
evaluation reuses the public functions in ``window``.
"""

import numpy as np

from . import window as _window

_BITREV_CACHE = {}


def _bitrev_indices(n):
    idx = _BITREV_CACHE.get(n)
    if idx is None:
        bits = n.bit_length() - 1
        x = np.arange(n)
        rev = np.zeros(n, np.int64)
        for _ in range(bits):
            rev = (rev << 1) | (x & 1)
            x >>= 1
        idx = rev
        _BITREV_CACHE[n] = idx
    return idx


def fft_batch(a):
    a = np.asarray(a, np.complex128)
    t, n = a.shape
    if n <= 1:
        return a.copy()
    out = a[:, _bitrev_indices(n)].copy()
    size = 2
    while size <= n:
        half = size >> 1
        twiddle = np.exp((-2j * np.pi / size) * np.arange(half))
        v = out.reshape(t, n // size, size)
        even = v[:, :, :half]
        odd = v[:, :, half:] * twiddle
        upper = even + odd
        lower = even - odd
        v[:, :, :half] = upper
        v[:, :, half:] = lower
        size <<= 1
    return out


def fft1(x):
    return fft_batch(np.asarray(x, np.complex128)[None, :])[0]


def _gather(signal, starts, n):
    idx = starts[:, None] + np.arange(n)[None, :]
    valid = (idx >= 0) & (idx < signal.shape[0])
    return np.where(valid, signal[np.clip(idx, 0, signal.shape[0] - 1)], 0.0)


def framed_transform(signal, starts, window):
    frames = _gather(signal, starts, window.shape[0])
    return fft_batch(frames * window[None, :])


def shifted_transform(signal, starts, shifts, theta, n, grad_mode, dx_coeff):
    k = np.arange(n, dtype=float)
    x = (k[None, :] - shifts[:, None]) + 0.5 * (theta - n + 1.0)
    if grad_mode:
        w = (0.5 - dx_coeff[:, None]) * _window.hann_dx(x, theta)
        w = w + _window.hann_dtheta(x, theta)
    else:
        w = _window.hann_continuous(x, theta)
    frames = _gather(signal, starts, n)
    return fft_batch(w * frames)
