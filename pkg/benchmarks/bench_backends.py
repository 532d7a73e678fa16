"""Timing comparison of the numba kernels against the pure-numpy fallback.

Runs the three hot kernels (batched FFT, framed transform, shifted
transform) on identical inputs through both backend modules and prints
per-call medians.  The numba functions are called once before timing so
compilation does not land in the measured loop.

Usage:
    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --signal-len 131072 --repeats 9
"""

import argparse
import time

import numpy as np

from specgrad import _kernels_numba as kn
from specgrad import _kernels_numpy as kp
from specgrad.stft import overlap_placements
from specgrad.window import WindowParams, frame_window


def median_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return sorted(times)[len(times) // 2]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--signal-len", type=int, default=65536)
    ap.add_argument("--frame-len", type=int, default=256)
    ap.add_argument("--repeats", type=int, default=7)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    n = args.frame_len
    signal = rng.standard_normal(args.signal_len)
    theta = n - 1.25

    hop = n // 4
    starts = np.arange(0, args.signal_len - n + 1, hop, dtype=np.int64)
    window = frame_window(WindowParams(n, theta)).value

    rows = rng.standard_normal((starts.shape[0], n)) + 1j * rng.standard_normal(
        (starts.shape[0], n)
    )

    alpha = 0.5
    live = int(args.signal_len / (alpha * theta)) + 1
    ostarts, shifts = overlap_placements(alpha, theta, live)
    keep = ostarts <= args.signal_len - 1
    ostarts, shifts = ostarts[keep], shifts[keep]
    dx_coeff = alpha * np.arange(ostarts.shape[0], dtype=float)

    cases = [
        (
            f"fft_batch      {rows.shape[0]}x{n}",
            lambda: kn.fft_batch(rows),
            lambda: kp.fft_batch(rows),
        ),
        (
            f"framed         {starts.shape[0]} frames",
            lambda: kn.framed_transform(signal, starts, window),
            lambda: kp.framed_transform(signal, starts, window),
        ),
        (
            f"shifted        {ostarts.shape[0]} frames",
            lambda: kn.shifted_transform(
                signal, ostarts, shifts, theta, n, False, dx_coeff
            ),
            lambda: kp.shifted_transform(
                signal, ostarts, shifts, theta, n, False, dx_coeff
            ),
        ),
        (
            f"shifted (grad) {ostarts.shape[0]} frames",
            lambda: kn.shifted_transform(
                signal, ostarts, shifts, theta, n, True, dx_coeff
            ),
            lambda: kp.shifted_transform(
                signal, ostarts, shifts, theta, n, True, dx_coeff
            ),
        ),
    ]

    # Warm-up: the first numba call compiles, and both backends should
    # agree before we bother timing them.
    for label, jit_fn, np_fn in cases:
        a, b = jit_fn(), np_fn()
        err = np.max(np.abs(a - b))
        if not err < 1e-9:
            raise SystemExit(f"backends disagree on {label}: max abs diff {err}")

    print(f"signal_len={args.signal_len} frame_len={n} repeats={args.repeats}")
    print(f"{'kernel':<28} {'numba ms':>10} {'numpy ms':>10} {'ratio':>7}")
    for label, jit_fn, np_fn in cases:
        t_jit = median_time(jit_fn, args.repeats) * 1e3
        t_np = median_time(np_fn, args.repeats) * 1e3
        print(f"{label:<28} {t_jit:>10.3f} {t_np:>10.3f} {t_np / t_jit:>6.2f}x")


if __name__ == "__main__":
    main()
