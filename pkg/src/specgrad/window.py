"""Continuous Hann taper family and its partial derivatives.

The taper ``h(x, theta) = 0.5 * (1 - cos(2*pi*x/theta))`` lives on the
support ``[0, theta]`` and is zero outside, so the effective window
length theta is a continuous parameter rather than a sample count.
``frame_window`` places that taper in the middle of an integer frame of
``support_n`` samples and also returns the two partial-derivative
sequences the gradient paths need.
"""

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import InvalidShiftError, InvalidThetaError, NotPowerOfTwoError


def is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class WindowParams:
    """Window configuration: integer frame support plus continuous length.

    ``support_n`` is the FFT size (power of two); ``theta`` may take any
    real value in ``[theta_min, theta_max]`` with ``theta_max <= support_n``.
    """

    support_n: int
    theta: float
    theta_min: float = 2.0
    theta_max: float | None = None

    def __post_init__(self):
        if not is_power_of_two(self.support_n):
            raise NotPowerOfTwoError(
                f"support_n must be a power of two, got {self.support_n}"
            )
        if self.theta_max is None:
            object.__setattr__(self, "theta_max", float(self.support_n))
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "theta_min", float(self.theta_min))
        object.__setattr__(self, "theta_max", float(self.theta_max))
        if not (
            2.0 <= self.theta_min <= self.theta <= self.theta_max <= self.support_n
        ):
            raise InvalidThetaError(
                f"need 2 <= theta_min <= theta <= theta_max <= support_n, got "
                f"theta={self.theta} in [{self.theta_min}, {self.theta_max}], "
                f"support_n={self.support_n}"
            )

    def with_theta(self, theta):
        return replace(self, theta=float(theta))

    def clamp(self, theta):
        """Project a candidate window length onto the admissible range."""
        return min(max(float(theta), self.theta_min), self.theta_max)


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _check_theta(theta):
    theta = float(theta)
    if not np.isfinite(theta) or theta <= 0.0:
        raise InvalidThetaError(f"theta must be finite and positive, got {theta}")
    return theta


def hann_continuous(x, theta):
    """Taper value at position x for window length theta; 0 off-support."""
    theta = _check_theta(theta)
    x, scalar = _as_array(x)
    inside = (x >= 0.0) & (x <= theta)
    out = np.where(inside, 0.5 - 0.5 * np.cos((2.0 * np.pi / theta) * x), 0.0)
    return float(out) if scalar else out


def hann_dtheta(x, theta):
    """Partial derivative of the taper in theta at fixed position.

    Zero outside the open support (0, theta), including at the endpoints.
    """
    theta = _check_theta(theta)
    x, scalar = _as_array(x)
    inside = (x > 0.0) & (x < theta)
    out = np.where(
        inside,
        -(np.pi / (theta * theta)) * x * np.sin((2.0 * np.pi / theta) * x),
        0.0,
    )
    return float(out) if scalar else out


def hann_dx(x, theta):
    """Partial derivative of the taper in position at fixed theta."""
    theta = _check_theta(theta)
    x, scalar = _as_array(x)
    inside = (x > 0.0) & (x < theta)
    out = np.where(inside, (np.pi / theta) * np.sin((2.0 * np.pi / theta) * x), 0.0)
    return float(out) if scalar else out


class FrameWindow(NamedTuple):
    value: np.ndarray
    d_theta: np.ndarray
    d_x: np.ndarray


def frame_window(params, shift=0.0):
    """Taper placed inside an integer frame, with derivative sequences.

    Element k is the taper at position ``(k - shift) + (theta - n + 1)/2``,
    which centers the support on the frame midpoint ``(n - 1)/2`` and slides
    it right by ``shift`` in [0, 1).  At ``theta = n - 1`` and shift 0 this
    reproduces the classical symmetric Hann window of length n.

    ``d_theta`` is the total theta-derivative at fixed frame position; it
    includes the recentering term, i.e. ``0.5 * hann_dx + hann_dtheta``.
    ``d_x`` is the plain positional derivative, needed when the frame
    placement itself moves with theta.
    """
    shift = float(shift)
    if not (0.0 <= shift < 1.0):
        raise InvalidShiftError(f"shift must lie in [0, 1), got {shift}")
    n = params.support_n
    theta = params.theta
    x = (np.arange(n, dtype=float) - shift) + 0.5 * (theta - n + 1.0)
    d_x = hann_dx(x, theta)
    return FrameWindow(
        value=hann_continuous(x, theta),
        d_theta=0.5 * d_x + hann_dtheta(x, theta),
        d_x=d_x,
    )
