import math

import numpy as np
import pytest

from conftest import make_noise
from oracles import fixed_overlap_stft, overlap_live_count
from specgrad.errors import InvalidAlphaError
from specgrad.optim import breakpoint_free_theta, one_sided_diff, relative_error
from specgrad.spectro import PipelineConfig, spectral_energy
from specgrad.stft import (
    Variant,
    min_breakpoint_distance,
    overlap_frame_capacity,
    overlap_live_frames,
    overlap_placements,
    stft_fixed_overlap_forward,
    stft_fixed_overlap_grad_theta,
)
from specgrad.window import WindowParams

ALPHA = 0.5


def params16(theta):
    # theta_min pins the output height; keep it modest so the literal
    # oracle stays cheap
    return WindowParams(16, theta, theta_min=6.0)


class TestPlacements:
    def test_floor_and_fraction(self):
        starts, shifts = overlap_placements(0.5, 9.7, 7)
        for i in range(7):
            pos = i * 0.5 * 9.7
            assert starts[i] == math.floor(pos)
            assert shifts[i] == pytest.approx(pos - math.floor(pos), abs=1e-12)
        assert np.all((shifts >= 0.0) & (shifts < 1.0))

    def test_live_frames_match_literal_count(self):
        for theta in (6.0, 9.7, 13.0, 15.9):
            assert overlap_live_frames(96, ALPHA, theta) == overlap_live_count(
                96, ALPHA, theta
            )

    def test_capacity_is_live_count_at_theta_min(self):
        p = params16(9.7)
        assert overlap_frame_capacity(96, ALPHA, p) == overlap_live_frames(
            96, ALPHA, p.theta_min
        )

    def test_min_breakpoint_distance_literal(self):
        theta, frames = 9.7, 12
        dists = [
            abs(i * ALPHA * theta - round(i * ALPHA * theta))
            for i in range(1, frames)
        ]
        assert min_breakpoint_distance(ALPHA, theta, frames) == pytest.approx(
            min(dists), abs=1e-15
        )
        assert min_breakpoint_distance(ALPHA, theta, 1) == math.inf

    @pytest.mark.parametrize("alpha", [0.0, -0.5, 1.5])
    def test_rejects_bad_alpha(self, alpha):
        with pytest.raises(InvalidAlphaError):
            stft_fixed_overlap_forward(make_noise(0, 64), alpha, params16(9.0))


class TestForward:
    @pytest.mark.parametrize("theta", [6.5, 9.7, 13.4])
    def test_matches_literal_summation(self, theta):
        signal = make_noise(9, 96)
        p = params16(theta)
        out = stft_fixed_overlap_forward(signal, ALPHA, p)
        capacity = overlap_frame_capacity(96, ALPHA, p)
        expected = fixed_overlap_stft(signal.samples, ALPHA, theta, 16, capacity)
        np.testing.assert_allclose(out.matrix, expected, atol=1e-10)
        assert out.matrix.shape == (capacity, 16)
        assert out.grid.variant is Variant.FIXED_OVERLAP
        assert out.grid.alpha == ALPHA

    def test_height_independent_of_theta(self):
        signal = make_noise(9, 96)
        a = stft_fixed_overlap_forward(signal, ALPHA, params16(6.5))
        b = stft_fixed_overlap_forward(signal, ALPHA, params16(15.0))
        assert a.matrix.shape == b.matrix.shape
        assert a.valid_frames > b.valid_frames  # shorter theta, denser frames

    def test_rows_past_valid_frames_are_exact_zeros(self):
        signal = make_noise(10, 96)
        out = stft_fixed_overlap_forward(signal, ALPHA, params16(15.0))
        assert out.valid_frames < out.matrix.shape[0]
        assert np.all(out.matrix[out.valid_frames :] == 0.0)

    def test_alpha_one_means_no_overlap(self):
        signal = make_noise(11, 96)
        out = stft_fixed_overlap_forward(signal, 1.0, params16(8.0))
        np.testing.assert_array_equal(
            out.grid.starts, 8 * np.arange(out.valid_frames)
        )

    def test_continuous_across_breakpoint(self):
        # theta* = 13 makes frame 2 jump: 2 * 0.5 * 13 = 13
        signal = make_noise(12, 96)
        delta = 1e-7
        mid = stft_fixed_overlap_forward(signal, ALPHA, params16(13.0)).matrix
        above = stft_fixed_overlap_forward(signal, ALPHA, params16(13.0 + delta)).matrix
        below = stft_fixed_overlap_forward(signal, ALPHA, params16(13.0 - delta)).matrix
        gap = float(np.max(np.abs(above - below)))
        assert gap <= 1e-5 * (1.0 + float(np.max(np.abs(mid))))


class TestGradTheta:
    def test_matches_entrywise_finite_difference(self):
        signal = make_noise(13, 96)
        theta = breakpoint_free_theta(ALPHA, 9.0, 12.0, 96)
        eps = 1e-5
        got = stft_fixed_overlap_grad_theta(signal, ALPHA, params16(theta))
        hi = stft_fixed_overlap_forward(signal, ALPHA, params16(theta + eps)).matrix
        lo = stft_fixed_overlap_forward(signal, ALPHA, params16(theta - eps)).matrix
        numeric = (hi - lo) / (2.0 * eps)
        scale = max(1.0, float(np.max(np.abs(got))))
        assert float(np.max(np.abs(got - numeric))) <= 1e-6 * scale

    def test_rows_past_valid_frames_are_zero(self):
        signal = make_noise(13, 96)
        out = stft_fixed_overlap_forward(signal, ALPHA, params16(15.0))
        grad = stft_fixed_overlap_grad_theta(signal, ALPHA, params16(15.0))
        assert grad.shape == out.matrix.shape
        assert np.all(grad[out.valid_frames :] == 0.0)

    def test_one_sided_quotients_agree_at_breakpoint(self):
        signal = make_noise(14, 96)
        config = PipelineConfig(variant=Variant.FIXED_OVERLAP, alpha=ALPHA)

        def loss(theta):
            return spectral_energy(signal, params16(theta), config)[0]

        theta_star = 13.0
        analytic = spectral_energy(signal, params16(theta_star), config)[1]
        up = one_sided_diff(loss, theta_star, 1e-5, +1)
        down = one_sided_diff(loss, theta_star, 1e-5, -1)
        assert relative_error(up, down) <= 1e-4
        assert relative_error(analytic, up) <= 1e-4
        assert relative_error(analytic, down) <= 1e-4
