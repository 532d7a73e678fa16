import struct
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from specgrad.signals import TimeSignal


def make_noise(seed, n, sample_rate=512.0):
    rng = np.random.default_rng(seed)
    return TimeSignal(rng.standard_normal(n), sample_rate)


@pytest.fixture
def noise_signal():
    return make_noise(0, 512)


def pytest_terminal_summary(terminalreporter):
    """One status line per acceptance criterion at the end of the run."""
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None) if mod else None
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num, label, ok, detail in sorted(results):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"{status}  criterion {num:2d}  {label}: {detail}")


def build_wav(
    samples,
    sample_rate=8000,
    channels=1,
    bits=16,
    audio_format=1,
    extra_chunk=None,
):
    """Assemble WAV bytes by hand so the reader is tested against an
    independent construction.  ``samples`` are int16 values."""
    payload = b"".join(struct.pack("<h", int(s)) for s in samples)
    block_align = channels * bits // 8
    fmt = struct.pack(
        "<HHIIHH",
        audio_format,
        channels,
        sample_rate,
        sample_rate * block_align,
        block_align,
        bits,
    )
    chunks = [b"fmt " + struct.pack("<I", len(fmt)) + fmt]
    if extra_chunk is not None:
        cid, body = extra_chunk
        chunks.append(cid + struct.pack("<I", len(body)) + body + b"\x00" * (len(body) & 1))
    chunks.append(b"data" + struct.pack("<I", len(payload)) + payload)
    body = b"WAVE" + b"".join(chunks)
    return b"RIFF" + struct.pack("<I", len(body)) + body
