"""Reference experiments: window-length sweeps, gradient-descent frequency
tracking, and joint training of a linear classifier with the window length."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import LengthMismatchError
from .optim import OptimTrace, TraceRecord, finite_diff, gd_theta, relative_error
from .signals import FreqLaw, LawKind, generate
from .spectro import (
    PipelineConfig,
    estimate_track,
    power_spectrogram,
    power_spectrogram_backward,
    theta_loss_and_grad,
    tracking_loss,
)
from .stft import (
    backprop_theta,
    grid_covering,
    stft_fixed_size_forward,
    stft_fixed_size_grad_theta,
)
from .window import WindowParams


@dataclass(frozen=True)
class TrackingDataConfig:
    """Synthetic dataset for the sweep and tracking experiments.

    Each signal follows the same law kind with mildly jittered parameters
    (seeded), so the batch is varied but reproducible.
    """

    n_signals: int = 16
    law: LawKind = LawKind.SINUSOIDAL_FM
    f_start: float = 128.0
    f_end: float = 200.0
    mod_rate: float = 5.0
    mod_depth: float = 48.0
    snr_db: float = 10.0
    sample_rate: float = 512.0
    n_samples: int = 512
    seed: int = 0


def make_tracking_dataset(config):
    rng = np.random.default_rng(config.seed)
    duration = config.n_samples / config.sample_rate
    signals, truths = [], []
    for j in range(config.n_signals):
        jitter = 1.0 + 0.05 * rng.uniform(-1.0, 1.0)
        if config.law is LawKind.CONSTANT:
            law = FreqLaw(config.law, config.f_start * jitter, duration)
        elif config.law is LawKind.LINEAR_CHIRP:
            law = FreqLaw(
                config.law, config.f_start * jitter, duration, f_end=config.f_end * jitter
            )
        else:
            law = FreqLaw(
                config.law,
                config.f_start * jitter,
                duration,
                mod_rate=config.mod_rate * (1.0 + 0.1 * rng.uniform(-1.0, 1.0)),
                mod_depth=config.mod_depth,
            )
        noise_seed = int(rng.integers(0, 2**31 - 1))
        sig, truth = generate(
            law, config.snr_db, noise_seed, config.sample_rate, config.n_samples
        )
        signals.append(sig)
        truths.append(truth)
    return signals, truths


@dataclass(frozen=True)
class SweepResult:
    thetas: np.ndarray
    losses: np.ndarray

    @property
    def argmin_theta(self):
        return float(self.thetas[int(np.argmin(self.losses))])

    @property
    def grid_step(self):
        return float(self.thetas[1] - self.thetas[0]) if len(self.thetas) > 1 else 0.0


def sweep_loss(signals, truths, theta_grid, params_base, config=PipelineConfig()):
    """Forward-only tracking loss over a grid of window lengths."""
    theta_grid = np.asarray(theta_grid, dtype=float)
    losses = np.array(
        [
            tracking_loss(signals, truths, params_base.with_theta(th), config)
            for th in theta_grid
        ]
    )
    return SweepResult(theta_grid, losses)


def run_tracking(
    data_config,
    optim_config,
    theta0,
    support_n=64,
    pipeline=PipelineConfig(),
    sweep_steps=32,
):
    """Gradient-descent window-length tuning plus a verification sweep.

    Returns ``(trace, final_track, sweep)``: the descent trace from
    ``theta0``, the centroid track of the first dataset signal at the final
    theta, and a loss sweep over the same bounds for cross-checking where
    the descent landed.
    """
    signals, truths = make_tracking_dataset(data_config)
    lo, hi = optim_config.theta_bounds
    base = WindowParams(support_n, lo, theta_min=lo, theta_max=hi)

    def loss_and_grad(theta):
        return theta_loss_and_grad(
            signals, truths, base.with_theta(theta), pipeline
        )

    trace = gd_theta(loss_and_grad, theta0, optim_config)
    final_params = base.with_theta(trace.final.theta)
    track, _, _ = estimate_track(signals[0], truths[0], final_params, pipeline)
    grid = np.linspace(lo, hi, sweep_steps)
    sweep = sweep_loss(signals, truths, grid, base, pipeline)
    return trace, track, sweep


@dataclass(frozen=True)
class ClassificationDataConfig:
    """Two-class synthetic set: slow-FM vs fast-FM tones."""

    n_per_class: int = 16
    n_classes: int = 2
    carrier: float = 128.0
    mod_depth: float = 40.0
    slow_rate: float = 2.0
    fast_rate: float = 16.0
    snr_db: float = 10.0
    sample_rate: float = 512.0
    n_samples: int = 512
    seed: int = 0

    def __post_init__(self):
        if self.n_classes < 2:
            raise ValueError("need at least two classes")


def make_classification_dataset(config):
    """Labelled signals; class k's modulation rate interpolates between
    slow_rate and fast_rate."""
    rng = np.random.default_rng(config.seed)
    duration = config.n_samples / config.sample_rate
    rates = np.linspace(config.slow_rate, config.fast_rate, config.n_classes)
    signals, labels = [], []
    for label, rate in enumerate(rates):
        for _ in range(config.n_per_class):
            law = FreqLaw(
                LawKind.SINUSOIDAL_FM,
                config.carrier * (1.0 + 0.03 * rng.uniform(-1.0, 1.0)),
                duration,
                mod_rate=rate * (1.0 + 0.05 * rng.uniform(-1.0, 1.0)),
                mod_depth=config.mod_depth,
            )
            sig, _ = generate(
                law,
                config.snr_db,
                int(rng.integers(0, 2**31 - 1)),
                config.sample_rate,
                config.n_samples,
            )
            signals.append(sig)
            labels.append(label)
    return signals, np.array(labels, dtype=np.int64)


@dataclass(frozen=True)
class JointModel:
    """Linear softmax classifier on mean-pooled one-sided power features,
    trained jointly with the window length."""

    weights: np.ndarray  # (n_bins, n_classes)
    bias: np.ndarray  # (n_classes,)
    theta: float

    @property
    def support_n(self):
        return 2 * (self.weights.shape[0] - 1)

    def params(self, theta_min=2.0, theta_max=None):
        return WindowParams(
            self.support_n, self.theta, theta_min=theta_min, theta_max=theta_max
        )


def init_joint_model(support_n, n_classes, theta0):
    n_bins = support_n // 2 + 1
    return JointModel(
        weights=np.zeros((n_bins, n_classes)),
        bias=np.zeros(n_classes),
        theta=float(theta0),
    )


def _pooled_features(signal, params):
    """Log-compressed mean one-sided power per bin over fully-contained
    frames, plus the pieces needed to push a feature cotangent back to theta.

    The log keeps the feature scale comparable across the whole admissible
    theta range (raw pooled power grows roughly like theta^2), so one
    weight learning rate works everywhere.
    """
    grid = grid_covering(len(signal), params.support_n, inside_only=True)
    out = stft_fixed_size_forward(signal, grid, params)
    power = power_spectrogram(out.matrix, one_sided=True)
    pooled = power.mean(axis=0)
    return np.log1p(pooled), pooled, out.matrix, grid


def joint_forward(model, signal):
    """Class probabilities for one signal at the model's current theta."""
    params = model.params()
    features, _, _, _ = _pooled_features(signal, params)
    return _softmax(features @ model.weights + model.bias)


def _softmax(z):
    z = z - np.max(z)
    e = np.exp(z)
    return e / e.sum()


def _joint_batch(model, signals, labels, with_grads=True):
    """Cross-entropy over the batch; gradients for weights, bias, theta."""
    params = model.params()
    n = len(signals)
    n_classes = model.bias.shape[0]
    loss = 0.0
    d_w = np.zeros_like(model.weights)
    d_b = np.zeros_like(model.bias)
    d_theta = 0.0
    for signal, label in zip(signals, labels):
        features, pooled, matrix, grid = _pooled_features(signal, params)
        probs = _softmax(features @ model.weights + model.bias)
        loss -= math.log(max(probs[label], 1e-300)) / n
        if not with_grads:
            continue
        dz = probs.copy()
        dz[label] -= 1.0
        dz /= n
        d_w += np.outer(features, dz)
        d_b += dz
        d_pooled = (model.weights @ dz) / (1.0 + pooled)  # log1p chain
        frames = matrix.shape[0]
        dl_dp = np.tile(d_pooled / frames, (frames, 1))
        cot = power_spectrogram_backward(matrix, dl_dp, one_sided=True)
        grad_rows = stft_fixed_size_grad_theta(signal, grid, params)
        d_theta += backprop_theta(cot, grad_rows)
    return loss, d_w, d_b, d_theta


@dataclass(frozen=True)
class JointConfig:
    epochs: int = 700
    lr_weights: float = 0.1
    lr_theta: float = 150.0
    theta_bounds: tuple[float, float] = (2.0, 32.0)
    grad_check_every: int = 25
    grad_check_epsilon: float = 1e-4
    seed: int = 0


def joint_train(signals, labels, support_n, theta0, config=JointConfig()):
    """Full-batch gradient descent on (weights, bias, theta) together.

    Every ``grad_check_every`` epochs the analytic theta-gradient is
    compared against a central finite difference of the batch loss (at
    frozen weights) and the relative error is recorded in the trace aux.
    Returns ``(trace, model)``.
    """
    if len(signals) != len(labels):
        raise LengthMismatchError(f"{len(signals)} signals vs {len(labels)} labels")
    n_classes = int(np.max(labels)) + 1
    if n_classes < 2:
        raise ValueError("need at least two classes")
    lo, hi = config.theta_bounds
    model = init_joint_model(support_n, n_classes, min(max(theta0, lo), hi))
    trace = OptimTrace()
    for epoch in range(config.epochs + 1):
        loss, d_w, d_b, d_theta = _joint_batch(model, signals, labels)
        aux = {
            "weight_norm": float(np.linalg.norm(model.weights)),
            "bias_norm": float(np.linalg.norm(model.bias)),
        }
        eps = config.grad_check_epsilon
        probe_ok = model.theta - eps >= 2.0 and model.theta + eps <= support_n
        if config.grad_check_every and epoch % config.grad_check_every == 0 and probe_ok:
            def frozen_loss(th):
                return _joint_batch(
                    replace(model, theta=float(th)), signals, labels, with_grads=False
                )[0]

            numeric = finite_diff(frozen_loss, model.theta, eps)
            aux["grad_check_rel"] = relative_error(d_theta, numeric)
        trace.append(TraceRecord(epoch, model.theta, float(loss), float(d_theta), aux))
        if epoch == config.epochs:
            break
        model = JointModel(
            weights=model.weights - config.lr_weights * d_w,
            bias=model.bias - config.lr_weights * d_b,
            theta=min(max(model.theta - config.lr_theta * d_theta, lo), hi),
        )
    return trace, model
