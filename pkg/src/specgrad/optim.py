"""Projected gradient descent on the window length, finite-difference
harnesses, and the gradcheck case matrix behind the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteLossError
from .signals import FreqLaw, LawKind, TimeSignal, generate
from .spectro import PipelineConfig, spectral_energy, theta_loss_and_grad
from .stft import Variant, min_breakpoint_distance, overlap_live_frames
from .window import WindowParams


@dataclass(frozen=True)
class OptimConfig:
    learning_rate: float
    max_iters: int
    theta_bounds: tuple[float, float]
    tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.theta_bounds
        if not (lo < hi):
            raise ValueError(f"theta_bounds must be ordered, got {self.theta_bounds}")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")


@dataclass
class TraceRecord:
    iteration: int
    theta: float
    loss: float
    grad_theta: float
    aux: dict = field(default_factory=dict)


@dataclass
class OptimTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def append(self, record):
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    @property
    def thetas(self):
        return np.array([r.theta for r in self.records])

    @property
    def losses(self):
        return np.array([r.loss for r in self.records])

    @property
    def final(self):
        return self.records[-1]


def _clamp(x, lo, hi):
    return min(max(x, lo), hi)


def gd_theta(loss_and_grad, theta0, config):
    """Projected gradient descent on a scalar theta.

    Evaluates, records, steps, clamps to the bounds; stops after
    ``max_iters`` steps or once the (clamped) step falls below
    ``tolerance``.  A non-finite loss or gradient aborts with the partial
    trace attached to the raised NonFiniteLossError.
    """
    lo, hi = config.theta_bounds
    trace = OptimTrace()
    theta = _clamp(float(theta0), lo, hi)
    for it in range(config.max_iters + 1):
        loss, grad = loss_and_grad(theta)
        trace.append(TraceRecord(it, theta, float(loss), float(grad)))
        if not (math.isfinite(loss) and math.isfinite(grad)):
            raise NonFiniteLossError(
                f"non-finite loss/gradient at iteration {it} (theta={theta})",
                trace=trace,
            )
        if it == config.max_iters:
            break
        new_theta = _clamp(theta - config.learning_rate * grad, lo, hi)
        if abs(new_theta - theta) < config.tolerance:
            break
        theta = new_theta
    return trace


def finite_diff(f, theta, epsilon):
    """Central difference (f(t+e) - f(t-e)) / 2e."""
    return (f(theta + epsilon) - f(theta - epsilon)) / (2.0 * epsilon)


def one_sided_diff(f, theta, epsilon, side):
    """Second-order one-sided difference quotient from above (side > 0)
    or below (side < 0); used where the central stencil would straddle a
    grid breakpoint."""
    if side > 0:
        return (-3.0 * f(theta) + 4.0 * f(theta + epsilon) - f(theta + 2 * epsilon)) / (
            2.0 * epsilon
        )
    return (3.0 * f(theta) - 4.0 * f(theta - epsilon) + f(theta - 2 * epsilon)) / (
        2.0 * epsilon
    )


def relative_error(analytic, numeric):
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-12)


def breakpoint_free_theta(
    alpha, theta_lo, theta_hi, signal_len, margin=1e-3, step=0.0137, offset=0.0
):
    """First theta in [theta_lo, theta_hi] whose frame positions i*alpha*theta
    all stay at least ``margin`` away from the integers for every live frame.

    Deterministic scan; raises if the range holds no such theta.
    """
    theta = theta_lo + offset
    while theta <= theta_hi:
        frames = overlap_live_frames(signal_len, alpha, theta)
        if min_breakpoint_distance(alpha, theta, frames) >= margin:
            return theta
        theta += step
    raise ValueError(
        f"no breakpoint-free theta with margin {margin} in "
        f"[{theta_lo}, {theta_hi}] for alpha={alpha}"
    )


@dataclass(frozen=True)
class GradCheckCase:
    name: str
    variant: Variant
    theta: float
    loss: object  # theta -> float
    analytic: object  # theta -> float
    epsilon: float
    tol: float
    one_sided: bool = False


@dataclass(frozen=True)
class GradCheckResult:
    name: str
    variant: str
    theta: float
    analytic: float
    numeric: float
    rel_error: float
    passed: bool


def _noise_signal(seed, n_samples, sample_rate=512.0):
    rng = np.random.default_rng(seed)
    return TimeSignal(rng.standard_normal(n_samples), sample_rate)


def _fm_batch(seed, count, n_samples=512, sample_rate=512.0, snr_db=10.0):
    signals, truths = [], []
    for j in range(count):
        law = FreqLaw(
            LawKind.SINUSOIDAL_FM,
            f_start=128.0,
            duration=n_samples / sample_rate,
            mod_rate=5.0,
            mod_depth=48.0,
        )
        sig, truth = generate(law, snr_db, seed + 1000 * j, sample_rate, n_samples)
        signals.append(sig)
        truths.append(truth)
    return signals, truths


def energy_case(variant, theta, seed, support_n=64, n_samples=512, alpha=0.5):
    """Total spectral energy as the checked scalar."""
    signal = _noise_signal(seed, n_samples)
    config = PipelineConfig(variant=variant, alpha=alpha)

    def loss(th):
        params = WindowParams(support_n, th)
        return spectral_energy(signal, params, config)[0]

    def analytic(th):
        params = WindowParams(support_n, th)
        return spectral_energy(signal, params, config)[1]

    fixed = variant is Variant.FIXED_SIZE
    return GradCheckCase(
        name=f"energy-{variant.value}-theta{theta:g}-seed{seed}",
        variant=variant,
        theta=theta,
        loss=loss,
        analytic=analytic,
        epsilon=1e-4 if fixed else 1e-5,
        tol=1e-5 if fixed else 1e-4,
    )


def tracking_case(variant, theta, seed, support_n=64, n_samples=512, alpha=0.5):
    """End-to-end centroid-tracking loss as the checked scalar."""
    signals, truths = _fm_batch(seed, count=4, n_samples=n_samples)
    config = PipelineConfig(variant=variant, alpha=alpha)

    def loss(th):
        params = WindowParams(support_n, th)
        return theta_loss_and_grad(signals, truths, params, config)[0]

    def analytic(th):
        params = WindowParams(support_n, th)
        return theta_loss_and_grad(signals, truths, params, config)[1]

    fixed = variant is Variant.FIXED_SIZE
    return GradCheckCase(
        name=f"tracking-{variant.value}-theta{theta:g}-seed{seed}",
        variant=variant,
        theta=theta,
        loss=loss,
        analytic=analytic,
        epsilon=1e-4 if fixed else 1e-5,
        tol=1e-5 if fixed else 1e-4,
    )


def breakpoint_case(p, i0, alpha, seed, support_n=64, n_samples=512):
    """Energy check pinned exactly at a grid jump theta = p / (i0 * alpha),
    compared against one-sided quotients."""
    theta = p / (i0 * alpha)
    case = energy_case(Variant.FIXED_OVERLAP, theta, seed, support_n, n_samples, alpha)
    return GradCheckCase(
        name=f"breakpoint-p{p}-i{i0}-seed{seed}",
        variant=Variant.FIXED_OVERLAP,
        theta=theta,
        loss=case.loss,
        analytic=case.analytic,
        epsilon=1e-5,
        tol=1e-4,
        one_sided=True,
    )


def default_cases(seed=0, support_n=64, n_samples=512, variant=None):
    """The standard gradcheck matrix run by the CLI."""
    cases = []
    if variant in (None, Variant.FIXED_SIZE):
        for theta in (8.3, 17.0, 31.9, 63.0):
            cases.append(energy_case(Variant.FIXED_SIZE, theta, seed, support_n, n_samples))
        cases.append(tracking_case(Variant.FIXED_SIZE, 24.7, seed + 7, support_n, n_samples))
    if variant in (None, Variant.FIXED_OVERLAP):
        for lo in (9.0, 21.0, 45.0):
            theta = breakpoint_free_theta(0.5, lo, lo + 4.0, n_samples)
            cases.append(
                energy_case(Variant.FIXED_OVERLAP, theta, seed + 1, support_n, n_samples)
            )
        theta = breakpoint_free_theta(0.5, 26.0, 30.0, n_samples, offset=0.0071)
        cases.append(
            tracking_case(Variant.FIXED_OVERLAP, theta, seed + 2, support_n, n_samples)
        )
        cases.append(breakpoint_case(10, 3, 0.5, seed + 3, support_n, n_samples))
        cases.append(breakpoint_case(17, 2, 0.5, seed + 4, support_n, n_samples))
    return cases


def run_case(case, corrupt=False):
    analytic = case.analytic(case.theta)
    if case.one_sided:
        up = one_sided_diff(case.loss, case.theta, case.epsilon, +1)
        down = one_sided_diff(case.loss, case.theta, case.epsilon, -1)
        numeric = 0.5 * (up + down)
    else:
        numeric = finite_diff(case.loss, case.theta, case.epsilon)
    if corrupt:
        analytic = analytic * 1.1
    rel = relative_error(analytic, numeric)
    return GradCheckResult(
        name=case.name,
        variant=case.variant.value,
        theta=case.theta,
        analytic=float(analytic),
        numeric=float(numeric),
        rel_error=float(rel),
        passed=bool(rel <= case.tol),
    )


def gradcheck_report(cases, corrupt=False):
    """Run every case; ``corrupt`` scales the analytic side by 1.1 so a
    detectable failure can be demonstrated on demand."""
    return [run_case(case, corrupt=corrupt) for case in cases]
