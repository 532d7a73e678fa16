import numpy as np
import pytest

from oracles import frame_taper, taper
from specgrad.errors import InvalidShiftError, InvalidThetaError, NotPowerOfTwoError
from specgrad.window import (
    FrameWindow,
    WindowParams,
    frame_window,
    hann_continuous,
    hann_dtheta,
    hann_dx,
    is_power_of_two,
)

FD_EPS = 1e-6


def central(f, x, eps=FD_EPS):
    return (f(x + eps) - f(x - eps)) / (2.0 * eps)


def test_is_power_of_two():
    assert [n for n in range(-2, 70) if is_power_of_two(n)] == [1, 2, 4, 8, 16, 32, 64]


class TestWindowParams:
    def test_defaults(self):
        p = WindowParams(64, 17.5)
        assert p.theta_min == 2.0
        assert p.theta_max == 64.0

    def test_rejects_non_power_of_two_support(self):
        with pytest.raises(NotPowerOfTwoError):
            WindowParams(48, 10.0)

    @pytest.mark.parametrize("theta", [1.9, 0.0, -3.0, 64.5])
    def test_rejects_theta_outside_range(self, theta):
        with pytest.raises(InvalidThetaError):
            WindowParams(64, theta)

    def test_rejects_theta_below_custom_min(self):
        with pytest.raises(InvalidThetaError):
            WindowParams(64, 3.0, theta_min=4.0)

    def test_rejects_theta_min_below_two(self):
        with pytest.raises(InvalidThetaError):
            WindowParams(64, 10.0, theta_min=1.0)

    def test_with_theta_and_clamp(self):
        p = WindowParams(64, 10.0, theta_min=4.0, theta_max=32.0)
        assert p.with_theta(20).theta == 20.0
        assert p.clamp(100.0) == 32.0
        assert p.clamp(1.0) == 4.0
        assert p.clamp(7.3) == 7.3


class TestTaper:
    def test_matches_literal_formula(self):
        theta = 9.3
        xs = np.linspace(-2.0, theta + 2.0, 113)
        expected = np.array([taper(x, theta) for x in xs])
        np.testing.assert_allclose(hann_continuous(xs, theta), expected, atol=1e-15)

    def test_support_edges(self):
        theta = 7.0
        assert hann_continuous(0.0, theta) == 0.0
        assert hann_continuous(theta, theta) == 0.0
        assert hann_continuous(-1e-9, theta) == 0.0
        assert hann_continuous(theta + 1e-9, theta) == 0.0
        assert hann_continuous(theta / 2.0, theta) == pytest.approx(1.0, abs=1e-15)

    def test_scalar_in_float_out(self):
        assert isinstance(hann_continuous(1.0, 5.0), float)
        assert isinstance(hann_dtheta(1.0, 5.0), float)
        assert isinstance(hann_dx(1.0, 5.0), float)

    @pytest.mark.parametrize("bad", [0.0, -1.0, float("nan")])
    def test_rejects_bad_theta(self, bad):
        with pytest.raises(InvalidThetaError):
            hann_continuous(1.0, bad)

    def test_dx_matches_finite_difference(self):
        theta = 11.7
        for x in np.linspace(0.3, theta - 0.3, 23):
            numeric = central(lambda u: taper(u, theta), x)
            assert hann_dx(x, theta) == pytest.approx(numeric, abs=1e-8)

    def test_dtheta_matches_finite_difference(self):
        theta = 11.7
        for x in np.linspace(0.3, theta - 0.3, 23):
            numeric = central(lambda t: taper(x, t), theta)
            assert hann_dtheta(x, theta) == pytest.approx(numeric, abs=1e-8)

    def test_derivatives_vanish_at_and_beyond_edges(self):
        theta = 6.0
        for x in (0.0, theta, -0.5, theta + 0.5):
            assert hann_dx(x, theta) == 0.0
            assert hann_dtheta(x, theta) == 0.0


class TestFrameWindow:
    def test_value_matches_literal_placement(self):
        params = WindowParams(16, 9.4)
        for shift in (0.0, 0.31, 0.99):
            got = frame_window(params, shift)
            np.testing.assert_allclose(
                got.value, frame_taper(16, 9.4, shift), atol=1e-15
            )

    def test_returns_named_fields(self):
        out = frame_window(WindowParams(8, 5.0))
        assert isinstance(out, FrameWindow)
        assert out.value.shape == out.d_theta.shape == out.d_x.shape == (8,)

    def test_classical_window_at_theta_n_minus_one(self):
        # at theta = n - 1 the placed taper is the symmetric Hann window
        for n in (8, 16, 64):
            got = frame_window(WindowParams(n, n - 1.0)).value
            np.testing.assert_allclose(got, np.hanning(n), atol=1e-12)

    def test_d_theta_includes_recentering(self):
        # the taper support recenters as theta grows, so the total
        # derivative is 0.5 * d/dx + d/dtheta; check against a finite
        # difference that moves the placement along with theta
        n = 16
        for theta in (5.3, 9.0, 14.6):
            got = frame_window(WindowParams(n, theta)).d_theta

            def placed(t, k):
                return taper(k + 0.5 * (t - n + 1.0), t)

            # tolerance note: at theta = 9 two samples land exactly on the
            # support edges, where the taper has quadratic one-sided contact;
            # the central difference then carries an O(eps) error (~1.5e-8)
            # around the true derivative of zero
            for k in range(n):
                numeric = central(lambda t: placed(t, k), theta)
                assert got[k] == pytest.approx(numeric, abs=1e-7)

    def test_d_x_sign_against_shift(self):
        # the shift enters as x = (k - shift) + ..., so d/dshift = -d_x
        params = WindowParams(16, 9.4)
        shift = 0.4
        got = frame_window(params, shift).d_x
        for k in range(16):
            numeric = central(lambda s: frame_taper(16, 9.4, s)[k], shift)
            assert -got[k] == pytest.approx(numeric, abs=1e-8)

    @pytest.mark.parametrize("shift", [-0.01, 1.0, 1.5])
    def test_rejects_shift_outside_unit_interval(self, shift):
        with pytest.raises(InvalidShiftError):
            frame_window(WindowParams(8, 5.0), shift)
