"""Spectrogram post-processing: power, centroid tracking, and the loss
chain that turns a batch of signals into a scalar loss plus d(loss)/d(theta)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatchError, ShapeMismatchError
from .signals import frame_truth
from .stft import (
    Variant,
    backprop_theta,
    grid_covering,
    stft_fixed_overlap_forward,
    stft_fixed_overlap_grad_theta,
    stft_fixed_size_forward,
    stft_fixed_size_grad_theta,
)

# Rows whose total power falls at or below this are treated as empty:
# their centroid is reported as the midpoint and they carry no loss.
EPS_DENOM = 1e-12


def power_spectrogram(matrix, one_sided=False):
    """|S|^2 per entry; one_sided keeps bins 0 .. n/2 inclusive."""
    matrix = np.asarray(matrix)
    p = matrix.real**2 + matrix.imag**2
    if one_sided:
        p = p[:, : matrix.shape[1] // 2 + 1]
    return np.ascontiguousarray(p)


def power_spectrogram_backward(matrix, dl_dp, one_sided=False):
    """Cotangent of the transform matrix given dL/d(power).

    Real part 2*Re(S)*dL/dP, imaginary part 2*Im(S)*dL/dP; bins dropped by
    the one-sided cut receive zero.
    """
    matrix = np.asarray(matrix)
    dl_dp = np.asarray(dl_dp, dtype=float)
    kept = matrix.shape[1] // 2 + 1 if one_sided else matrix.shape[1]
    if dl_dp.shape != (matrix.shape[0], kept):
        raise ShapeMismatchError(
            f"dL/dP shape {dl_dp.shape}, expected {(matrix.shape[0], kept)}"
        )
    cot = np.zeros_like(matrix, dtype=np.complex128)
    cot[:, :kept] = 2.0 * matrix[:, :kept] * dl_dp
    return cot


def centroid_estimate(power, eps_denom=EPS_DENOM):
    """Power-weighted mean bin per row.

    Returns ``(estimates, ok)``; rows with total power <= eps_denom get the
    midpoint estimate (n_bins / 2) and ok=False, and are meant to be
    excluded from any loss built on top.
    """
    power = np.asarray(power, dtype=float)
    denom = power.sum(axis=1)
    ok = denom > eps_denom
    bins = np.arange(power.shape[1], dtype=float)
    numer = power @ bins
    estimates = np.where(ok, numer / np.where(ok, denom, 1.0), power.shape[1] / 2.0)
    return estimates, ok


def centroid_backward(power, dl_dyhat, eps_denom=EPS_DENOM):
    """dL/d(power) given dL/d(centroid); zero for empty rows."""
    power = np.asarray(power, dtype=float)
    dl_dyhat = np.asarray(dl_dyhat, dtype=float)
    if dl_dyhat.shape != (power.shape[0],):
        raise ShapeMismatchError(
            f"dL/dyhat shape {dl_dyhat.shape}, expected {(power.shape[0],)}"
        )
    estimates, ok = centroid_estimate(power, eps_denom)
    denom = np.where(ok, power.sum(axis=1), 1.0)
    bins = np.arange(power.shape[1], dtype=float)
    scale = np.where(ok, dl_dyhat / denom, 0.0)
    return scale[:, None] * (bins[None, :] - estimates[:, None])


@dataclass(frozen=True)
class FrequencyTrack:
    """Per-frame frequency estimates against ground truth, both in bins."""

    estimates: np.ndarray
    truth: np.ndarray

    def __post_init__(self):
        est = np.asarray(self.estimates, dtype=float)
        tru = np.asarray(self.truth, dtype=float)
        if est.shape != tru.shape or est.ndim != 1:
            raise LengthMismatchError(
                f"estimates {est.shape} vs truth {tru.shape}"
            )
        object.__setattr__(self, "estimates", est)
        object.__setattr__(self, "truth", tru)

    @property
    def frame_count(self):
        return self.estimates.shape[0]


def mse_loss(tracks):
    """Mean over tracks of the squared error summed over frames.

    Returns the loss and, per track, d(loss)/d(estimates) =
    2 * (estimates - truth) / n_tracks.
    """
    if len(tracks) == 0:
        raise ValueError("need at least one track")
    n = len(tracks)
    loss = 0.0
    grads = []
    for track in tracks:
        diff = track.estimates - track.truth
        loss += float(diff @ diff)
        grads.append((2.0 / n) * diff)
    return loss / n, grads


@dataclass(frozen=True)
class PipelineConfig:
    """Frame layout of the tracking pipeline.

    ``hop``/``b0`` apply to the fixed-size variant (hop defaults to half
    the support), ``alpha`` to the fixed-overlap variant.
    """

    variant: Variant = Variant.FIXED_SIZE
    hop: int | None = None
    alpha: float = 0.5
    b0: int = 0


def _scored_forward(signal, params, config, with_grad):
    """Forward transform restricted to frames fully inside the signal.

    Returns (S_rows, grad_rows_or_None, starts).  Scoring only full frames
    keeps the centroid fed with real samples and the truth defined at every
    scored frame center.
    """
    n = params.support_n
    length = len(signal)
    if config.variant is Variant.FIXED_SIZE:
        grid = grid_covering(length, n, hop=config.hop, b0=config.b0, inside_only=True)
        out = stft_fixed_size_forward(signal, grid, params)
        grad = (
            stft_fixed_size_grad_theta(signal, grid, params) if with_grad else None
        )
        return out.matrix, grad, grid.starts
    out = stft_fixed_overlap_forward(signal, config.alpha, params)
    grad = (
        stft_fixed_overlap_grad_theta(signal, config.alpha, params)
        if with_grad
        else None
    )
    starts = out.grid.starts
    scored = int(np.searchsorted(starts, length - n, side="right"))
    scored = min(scored, out.valid_frames)
    return (
        out.matrix[:scored],
        None if grad is None else grad[:scored],
        starts[:scored],
    )


def estimate_track(signal, truth_hz, params, config=PipelineConfig()):
    """Centroid track and aligned truth for one signal at the current theta.

    Returns ``(track, starts, ok)`` where empty frames are masked out of
    the track but kept in ``starts``/``ok`` for alignment.
    """
    matrix, _, starts = _scored_forward(signal, params, config, with_grad=False)
    power = power_spectrogram(matrix, one_sided=True)
    estimates, ok = centroid_estimate(power)
    grid_like = _StartsView(starts)
    truth_bins = frame_truth(truth_hz, grid_like, params, signal.sample_rate)
    track = FrequencyTrack(estimates[ok], truth_bins[ok])
    return track, starts, ok


@dataclass(frozen=True)
class _StartsView:
    starts: np.ndarray


def theta_loss_and_grad(signals, truths_hz, params, config=PipelineConfig()):
    """Tracking loss over a batch and its derivative in theta.

    Chain: forward transform -> one-sided power -> per-frame centroid ->
    squared-error loss against the frame-aligned truth.  The backward pass
    retraces it: loss grad -> centroid cotangent -> power cotangent ->
    contraction with the entry-wise theta-gradient of the transform.
    """
    loss, grad, _ = _tracking_pass(signals, truths_hz, params, config, True)
    return loss, grad


def tracking_loss(signals, truths_hz, params, config=PipelineConfig()):
    """Forward-only variant of ``theta_loss_and_grad`` for loss sweeps."""
    loss, _, _ = _tracking_pass(signals, truths_hz, params, config, False)
    return loss


def _tracking_pass(signals, truths_hz, params, config, with_grad):
    if len(signals) != len(truths_hz):
        raise LengthMismatchError(
            f"{len(signals)} signals vs {len(truths_hz)} truth series"
        )
    if len(signals) == 0:
        raise ValueError("need at least one signal")

    stages = []
    tracks = []
    for signal, truth in zip(signals, truths_hz):
        matrix, grad_rows, starts = _scored_forward(
            signal, params, config, with_grad
        )
        power = power_spectrogram(matrix, one_sided=True)
        estimates, ok = centroid_estimate(power)
        truth_bins = frame_truth(
            truth, _StartsView(starts), params, signal.sample_rate
        )
        tracks.append(FrequencyTrack(estimates[ok], truth_bins[ok]))
        stages.append((matrix, grad_rows, power, ok))

    loss, track_grads = mse_loss(tracks)
    if not with_grad:
        return loss, None, tracks

    grad_theta = 0.0
    for (matrix, grad_rows, power, ok), dl_dest in zip(stages, track_grads):
        dl_dyhat = np.zeros(power.shape[0])
        dl_dyhat[ok] = dl_dest
        dl_dp = centroid_backward(power, dl_dyhat)
        cot = power_spectrogram_backward(matrix, dl_dp, one_sided=True)
        grad_theta += backprop_theta(cot, grad_rows)
    return loss, grad_theta, tracks


def spectral_energy(signal, params, config=PipelineConfig()):
    """Total |S|^2 of the chosen variant and its theta-derivative.

    The simplest end-to-end differentiable scalar; used heavily by the
    gradient checks.
    """
    if config.variant is Variant.FIXED_SIZE:
        grid = grid_covering(
            len(signal), params.support_n, hop=config.hop, b0=config.b0
        )
        matrix = stft_fixed_size_forward(signal, grid, params).matrix
        grad = stft_fixed_size_grad_theta(signal, grid, params)
    else:
        matrix = stft_fixed_overlap_forward(signal, config.alpha, params).matrix
        grad = stft_fixed_overlap_grad_theta(signal, config.alpha, params)
    energy = float(np.sum(matrix.real**2 + matrix.imag**2))
    return energy, backprop_theta(2.0 * matrix, grad)
