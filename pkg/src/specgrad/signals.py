"""Synthetic test signals, per-frame ground truth, and a small WAV reader."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    LengthMismatchError,
    MalformedHeaderError,
    NonFiniteInputError,
    NyquistViolationError,
    UnsupportedFormatError,
)


@dataclass(frozen=True)
class TimeSignal:
    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise ValueError("samples must be a non-empty 1-D array")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteInputError("signal contains non-finite samples")
        if not (self.sample_rate > 0):
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self):
        return len(self) / self.sample_rate


class LawKind(enum.Enum):
    CONSTANT = "constant"
    LINEAR_CHIRP = "chirp"
    SINUSOIDAL_FM = "fm"


@dataclass(frozen=True)
class FreqLaw:
    """Instantaneous-frequency law f(t) in Hz over [0, duration] seconds.

    constant:  f_start
    chirp:     f_start -> f_end, linear in t
    fm:        f_start + mod_depth * sin(2*pi*mod_rate*t)
    """

    kind: LawKind
    f_start: float
    duration: float
    f_end: float | None = None
    mod_rate: float | None = None
    mod_depth: float | None = None

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if self.kind is LawKind.LINEAR_CHIRP and self.f_end is None:
            raise ValueError("chirp law needs f_end")
        if self.kind is LawKind.SINUSOIDAL_FM and (
            self.mod_rate is None or self.mod_depth is None
        ):
            raise ValueError("fm law needs mod_rate and mod_depth")

    def freq_at(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind is LawKind.CONSTANT:
            return np.full_like(t, self.f_start)
        if self.kind is LawKind.LINEAR_CHIRP:
            return self.f_start + (self.f_end - self.f_start) * (t / self.duration)
        return self.f_start + self.mod_depth * np.sin(
            2.0 * np.pi * self.mod_rate * t
        )

    def freq_range(self):
        if self.kind is LawKind.CONSTANT:
            return self.f_start, self.f_start
        if self.kind is LawKind.LINEAR_CHIRP:
            return min(self.f_start, self.f_end), max(self.f_start, self.f_end)
        return self.f_start - abs(self.mod_depth), self.f_start + abs(self.mod_depth)


def generate(law, snr_db, seed, sample_rate, n_samples):
    """Synthesize a unit tone following ``law`` plus white Gaussian noise.

    The phase is accumulated sample by sample, so the instantaneous
    frequency of the clean tone equals the law exactly at every sample.
    Returns ``(TimeSignal, truth_hz)`` with the per-sample truth in Hz.
    ``snr_db=math.inf`` (or None) disables the noise.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    t = np.arange(n_samples) / sample_rate
    freq = law.freq_at(t)
    lo, hi = law.freq_range()
    if not (0.0 < lo and hi < sample_rate / 2.0):
        raise NyquistViolationError(
            f"law spans [{lo}, {hi}] Hz, outside (0, {sample_rate / 2})"
        )
    phase = np.empty(n_samples)
    phase[0] = 0.0
    np.cumsum((2.0 * np.pi / sample_rate) * freq[:-1], out=phase[1:])
    clean = np.sin(phase)
    if snr_db is None or math.isinf(snr_db):
        samples = clean
    else:
        rng = np.random.default_rng(seed)
        p_signal = float(np.mean(clean * clean))
        p_noise = p_signal / (10.0 ** (snr_db / 10.0))
        samples = clean + math.sqrt(p_noise) * rng.standard_normal(n_samples)
    return TimeSignal(samples, float(sample_rate)), freq


def frame_truth(truth_hz, grid, params, sample_rate):
    """Ground-truth frequency per frame, in bin units.

    Evaluates the per-sample truth at each frame center
    ``b_i + (support_n - 1)/2`` (linear interpolation at the half-integer
    centers) and converts Hz to bins with ``support_n / sample_rate``.
    """
    truth_hz = np.asarray(truth_hz, dtype=float)
    centers = grid.starts.astype(float) + 0.5 * (params.support_n - 1)
    hz = np.interp(centers, np.arange(truth_hz.shape[0], dtype=float), truth_hz)
    return hz * (params.support_n / sample_rate)


def _require(cond, exc, message):
    if not cond:
        raise exc(message)


def read_wav_pcm16_mono(path):
    """Read a PCM16 mono WAV file into a TimeSignal scaled to [-1, 1).

    Only the canonical RIFF/WAVE layout with a PCM ``fmt `` chunk is
    accepted; unknown chunks are skipped.  Raises MalformedHeaderError for
    structural problems and UnsupportedFormatError for valid files that
    are not 16-bit mono PCM.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    _require(len(blob) >= 12, MalformedHeaderError, "file shorter than RIFF header")
    _require(blob[0:4] == b"RIFF", MalformedHeaderError, "missing RIFF magic")
    _require(blob[8:12] == b"WAVE", MalformedHeaderError, "missing WAVE form type")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(blob):
        chunk_id = blob[pos : pos + 4]
        size = int.from_bytes(blob[pos + 4 : pos + 8], "little")
        pos += 8
        _require(
            pos + size <= len(blob), MalformedHeaderError, f"truncated {chunk_id!r} chunk"
        )
        body = blob[pos : pos + size]
        if chunk_id == b"fmt ":
            _require(size >= 16, MalformedHeaderError, "fmt chunk shorter than 16 bytes")
            fmt = {
                "audio_format": int.from_bytes(body[0:2], "little"),
                "channels": int.from_bytes(body[2:4], "little"),
                "sample_rate": int.from_bytes(body[4:8], "little"),
                "bits": int.from_bytes(body[14:16], "little"),
            }
        elif chunk_id == b"data":
            payload = body
        pos += size + (size & 1)  # chunks are word aligned

    _require(fmt is not None, MalformedHeaderError, "no fmt chunk")
    _require(payload is not None, MalformedHeaderError, "no data chunk")
    _require(
        fmt["audio_format"] == 1,
        UnsupportedFormatError,
        f"audio format {fmt['audio_format']}, expected PCM (1)",
    )
    _require(
        fmt["channels"] == 1,
        UnsupportedFormatError,
        f"{fmt['channels']} channels, expected mono",
    )
    _require(
        fmt["bits"] == 16, UnsupportedFormatError, f"{fmt['bits']}-bit, expected 16"
    )
    _require(fmt["sample_rate"] > 0, MalformedHeaderError, "sample rate is zero")
    _require(len(payload) >= 2, MalformedHeaderError, "empty data chunk")
    _require(len(payload) % 2 == 0, MalformedHeaderError, "odd data chunk size")
    samples = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    return TimeSignal(samples, float(fmt["sample_rate"]))


def check_paired(a, b, what="sequences"):
    if len(a) != len(b):
        raise LengthMismatchError(f"{what} differ in length: {len(a)} vs {len(b)}")
