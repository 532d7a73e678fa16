"""Short-time Fourier transforms with a differentiable window length.

Two framings are provided.  The fixed-size variant keeps frame starts on
a rigid integer grid, so theta only reshapes the taper inside each frame.
The fixed-overlap variant ties the hop to theta (``b_i = floor(i*alpha*theta)``)
and keeps the effective overlap constant; the fractional part of
``i*alpha*theta`` slides the taper inside the frame and a post-FFT phase
rotation re-references each row to absolute time, which is what makes the
transform continuous (and a.e. differentiable) in theta even though the
integer starts jump.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import (
    InvalidAlphaError,
    InvalidGridError,
    ShapeMismatchError,
)
from .signals import TimeSignal
from .window import WindowParams, frame_window

if _backend.USE_NUMBA:
    from . import _kernels_numba as _K
else:
    from . import _kernels_numpy as _K


class Variant(enum.Enum):
    FIXED_SIZE = "fixed-size"
    FIXED_OVERLAP = "fixed-overlap"


@dataclass(frozen=True)
class FrameGrid:
    variant: Variant
    starts: np.ndarray
    hop: int | None = None
    alpha: float | None = None

    def __post_init__(self):
        starts = np.asarray(self.starts, dtype=np.int64)
        if starts.ndim != 1:
            raise InvalidGridError("starts must be 1-D")
        if starts.shape[0] >= 1 and np.any(np.diff(starts) < 0):
            raise InvalidGridError("starts must be non-decreasing")
        object.__setattr__(self, "starts", starts)

    @property
    def n_frames(self):
        return self.starts.shape[0]

    @classmethod
    def fixed_size(cls, n_frames, hop, b0=0):
        if n_frames < 1 or hop < 1:
            raise InvalidGridError("need n_frames >= 1 and hop >= 1")
        starts = b0 + hop * np.arange(n_frames, dtype=np.int64)
        return cls(Variant.FIXED_SIZE, starts, hop=int(hop))


def grid_covering(signal_len, support_n, hop=None, b0=0, inside_only=False):
    """Fixed-size grid over a signal of the given length.

    With ``inside_only`` the grid stops at the last frame fully contained
    in the signal; otherwise it includes every frame touching at least one
    sample (later reads are zero padded).
    """
    hop = support_n // 2 if hop is None else int(hop)
    if hop < 1:
        raise InvalidGridError(f"hop must be >= 1, got {hop}")
    last = signal_len - support_n if inside_only else signal_len - 1
    span = last - b0
    if span < 0:
        raise InvalidGridError(
            f"no admissible frame: signal_len={signal_len}, b0={b0}, "
            f"support_n={support_n}"
        )
    return FrameGrid.fixed_size(span // hop + 1, hop, b0)


@dataclass(frozen=True)
class StftOutput:
    matrix: np.ndarray
    grid: FrameGrid
    params: WindowParams
    valid_frames: int


def _check_alpha(alpha):
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise InvalidAlphaError(f"alpha must lie in (0, 1], got {alpha}")
    return alpha


def overlap_placements(alpha, theta, n_frames):
    """Integer starts and fractional shifts for the first n_frames frames."""
    positions = np.arange(n_frames, dtype=float) * (alpha * theta)
    starts = np.floor(positions).astype(np.int64)
    return starts, positions - starts


def overlap_live_frames(signal_len, alpha, theta):
    """Frames whose span still touches the signal: floor(i*alpha*theta) <= len-1."""
    count = 1  # frame 0 starts at 0
    while math.floor(count * alpha * theta) <= signal_len - 1:
        count += 1
    return count


def overlap_frame_capacity(signal_len, alpha, params):
    """Row count of the fixed-overlap output: the frame count at theta_min,
    the smallest admissible theta, so the matrix shape is theta-independent."""
    return overlap_live_frames(signal_len, alpha, params.theta_min)


def min_breakpoint_distance(alpha, theta, n_frames):
    """Distance from the nearest grid jump: min over frames of the distance
    of i*alpha*theta to the integers (frame 0 never jumps)."""
    i = np.arange(1, n_frames, dtype=float)
    pos = i * (alpha * theta)
    return float(np.min(np.abs(pos - np.round(pos)))) if i.size else math.inf


def _phase_rows(starts, n):
    # e^{-2j*pi*b*f/n}; reduce b mod n first so the angle stays small and
    # the twiddles stay accurate for long signals.
    b = np.mod(starts, n).astype(float)
    f = np.arange(n, dtype=float)
    return np.exp((-2j * np.pi / n) * (b[:, None] * f[None, :]))


def _samples(signal):
    if isinstance(signal, TimeSignal):
        return signal.samples
    return np.asarray(signal, dtype=np.float64)


def stft_fixed_size_forward(signal, grid, params):
    """Rows i = FFT(taper * signal[b_i : b_i + n]); taper shared by all rows."""
    if grid.variant is not Variant.FIXED_SIZE:
        raise InvalidGridError(f"expected a fixed-size grid, got {grid.variant}")
    samples = _samples(signal)
    win = frame_window(params).value
    matrix = _K.framed_transform(samples, grid.starts, win)
    return StftOutput(matrix, grid, params, valid_frames=grid.n_frames)


def stft_fixed_size_grad_theta(signal, grid, params):
    """Entry-wise d/d(theta) of the fixed-size forward transform.

    Same framed transform with the taper's theta-derivative sequence in
    place of the taper.
    """
    if grid.variant is not Variant.FIXED_SIZE:
        raise InvalidGridError(f"expected a fixed-size grid, got {grid.variant}")
    samples = _samples(signal)
    dwin = frame_window(params).d_theta
    return _K.framed_transform(samples, grid.starts, dwin)


def _overlap_rows(signal, alpha, params, grad_mode):
    alpha = _check_alpha(alpha)
    samples = _samples(signal)
    n = params.support_n
    capacity = overlap_frame_capacity(samples.shape[0], alpha, params)
    live = min(overlap_live_frames(samples.shape[0], alpha, params.theta), capacity)
    starts, shifts = overlap_placements(alpha, params.theta, live)
    dx_coeff = alpha * np.arange(live, dtype=float)
    rows = _K.shifted_transform(
        samples, starts, shifts, params.theta, n, grad_mode, dx_coeff
    )
    matrix = np.zeros((capacity, n), np.complex128)
    matrix[:live] = rows * _phase_rows(starts, n)
    grid = FrameGrid(Variant.FIXED_OVERLAP, starts, alpha=alpha)
    return matrix, grid, live


def stft_fixed_overlap_forward(signal, alpha, params):
    """Theta-continuous transform with theta-proportional hop.

    Output height is fixed at the frame count for theta_min; rows past
    ``valid_frames`` are exactly zero.
    """
    matrix, grid, live = _overlap_rows(signal, alpha, params, grad_mode=False)
    return StftOutput(matrix, grid, params, valid_frames=live)


def stft_fixed_overlap_grad_theta(signal, alpha, params):
    """Entry-wise d/d(theta) of the fixed-overlap forward transform.

    Valid almost everywhere in theta: between grid jumps the starts are
    constant, so differentiating the shifted taper is all that is needed
    (the per-frame shift moves at rate i*alpha, the phase factor not at
    all).  At the jump points themselves the one-sided limits coincide,
    and this formula returns that shared value.
    """
    matrix, _, _ = _overlap_rows(signal, alpha, params, grad_mode=True)
    return matrix


def backprop_theta(cotangent, grad_matrix):
    """Contract loss cotangents with the entry-wise theta-gradient.

    ``cotangent`` carries dL/dRe(S) in its real part and dL/dIm(S) in its
    imaginary part; the result is the scalar dL/d(theta).
    """
    cotangent = np.asarray(cotangent)
    grad_matrix = np.asarray(grad_matrix)
    if cotangent.shape != grad_matrix.shape:
        raise ShapeMismatchError(
            f"cotangent {cotangent.shape} vs gradient {grad_matrix.shape}"
        )
    return float(
        np.sum(cotangent.real * grad_matrix.real)
        + np.sum(cotangent.imag * grad_matrix.imag)
    )
