import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from landmarkbm import AsymptoticData, make_gaussian, make_matern, parse_kernel_spec
from landmarkbm.kernels import RadialKernel, shipped_kernels

EXP_M1 = 0.36787944117144233  # exp(-1), float64


def central_fd(f, r, h):
    return (f(r + h) - f(r - h)) / (2.0 * h)


class TestConstruction:
    def test_matern12_matches_exponential(self):
        k = make_matern(0.5, 1.0)
        assert k.eval(0.0) == 1.0
        assert k.eval(1.0) == pytest.approx(EXP_M1, rel=1e-15)

    def test_matern32_preset_normalization(self):
        k = make_matern(1.5, 2.0)
        assert k.lam == 2.0
        assert k.eval(0.0) == 2.0
        # 2 (1 + 1) e^{-1}
        assert k.eval(1.0) == pytest.approx(4.0 * EXP_M1, rel=1e-15)

    def test_gaussian_values(self):
        k = make_gaussian(1.0)
        assert k.eval(0.0) == 1.0
        assert k.eval(1.0) == pytest.approx(EXP_M1, rel=1e-15)

    def test_matern52_and_72_polynomials(self):
        k52 = make_matern(2.5)
        k72 = make_matern(3.5)
        r = 0.7
        assert k52.eval(r) == pytest.approx((3 + 3 * r + r * r) * np.exp(-r), rel=1e-14)
        assert k72.eval(r) == pytest.approx(
            (15 + 15 * r + 6 * r * r + r**3) * np.exp(-r), rel=1e-14
        )

    @given(
        nu=st.sampled_from([0.5, 1.5, 2.5, 3.5]),
        scale=st.floats(0.1, 10.0, allow_nan=False),
    )
    @settings(max_examples=40, deadline=None)
    def test_lambda_is_scale_times_profile_at_zero(self, nu, scale):
        k = make_matern(nu, scale)
        assert k.lam == pytest.approx(scale * make_matern(nu, 1.0).eval(0.0), rel=1e-15)
        assert k.lam == pytest.approx(k.eval(0.0), rel=1e-15)

    def test_rejects_non_half_integer_order(self):
        for bad in (1.0, 2.0, 0.25, -0.5, 0.0):
            with pytest.raises(ValueError):
                make_matern(bad)

    def test_rejects_orders_beyond_table(self):
        with pytest.raises(ValueError, match="unsupported order"):
            make_matern(4.5)

    def test_rejects_bad_scale(self):
        with pytest.raises(ValueError):
            make_matern(0.5, 0.0)
        with pytest.raises(ValueError):
            make_gaussian(-1.0)


class TestEvaluation:
    def test_negative_radius_rejected(self, shipped_kernel):
        with pytest.raises(ValueError):
            shipped_kernel.eval(-0.1)
        with pytest.raises(ValueError):
            shipped_kernel.eval(np.array([0.5, -0.5]))

    def test_derivative_domain_is_positive(self, shipped_kernel):
        with pytest.raises(ValueError):
            shipped_kernel.eval_derivative(0.0)
        with pytest.raises(ValueError):
            shipped_kernel.eval_derivative(-1.0)

    def test_gaussian_derivative_value(self):
        k = make_gaussian(1.0)
        # -2 e^{-1}, and cross-check against a central difference
        assert k.eval_derivative(1.0) == pytest.approx(-2 * EXP_M1, rel=1e-15)
        fd = central_fd(k.eval, 1.0, 1e-6)
        assert k.eval_derivative(1.0) == pytest.approx(fd, rel=1e-8)

    def test_matern12_derivative_is_minus_profile(self):
        k = make_matern(0.5, 1.0)
        for r in (1e-6, 0.3, 2.0, 17.0):
            assert k.eval_derivative(r) == pytest.approx(-k.eval(r), rel=1e-15)

    def test_matern32_derivative_vanishes_at_origin(self):
        k = make_matern(1.5, 2.0)
        assert abs(k.eval_derivative(1e-9)) < 1e-8

    def test_derivative_matches_fd_on_log_grid(self, shipped_kernel):
        k = shipped_kernel
        for r in np.geomspace(1e-6, 1e2, 33):
            h = 1e-6 * max(r, 1.0)
            fd = central_fd(k.eval, r, h)
            exact = k.eval_derivative(r)
            assert abs(exact - fd) <= 1e-6 * (1.0 + abs(exact))

    def test_derivative_nonpositive(self, shipped_kernel):
        r = np.geomspace(1e-6, 1e2, 50)
        assert np.all(shipped_kernel.eval_derivative(r) <= 0.0)


class TestShapeInvariants:
    def test_monotone_decay(self, shipped_kernel):
        # strictly decreasing where values are representable (the Gaussian
        # underflows to exactly 0.0 past r ~ 27), weakly decreasing beyond
        r = np.geomspace(1e-6, 20.0, 60)
        vals = shipped_kernel.eval(r)
        assert np.all(np.diff(vals) < 0)
        assert np.all(vals > 0)
        far = shipped_kernel.eval(np.geomspace(20.0, 1e2, 20))
        assert np.all(np.diff(far) <= 0)

    def test_decay_at_infinity(self, shipped_kernel):
        k = shipped_kernel
        for r in (1e2, 1e3):
            assert k.eval(r) < 1e-20 * k.lam

    def test_gap_positive(self, shipped_kernel):
        k = shipped_kernel
        r = np.geomspace(1e-8, 1e2, 80)
        assert np.all(k.gap(r) > 0)
        assert np.all(k.lam - k.eval(r) >= 0)

    def test_gap_is_stable_at_small_r(self, shipped_kernel):
        # direct subtraction loses all digits near 0; gap() must not
        k = shipped_kernel
        D, gamma = k.asymptotics.D, k.asymptotics.gamma
        r = 1e-8
        assert k.gap(r) == pytest.approx(D * r**gamma, rel=1e-4)


class TestAsymptotics:
    def test_table(self):
        cases = [
            (make_matern(0.5, 1.0), 1.0, 1.0),
            (make_matern(1.5, 2.0), 1.0, 2.0),
            (make_matern(2.5, 1.0), 0.5, 2.0),
            (make_matern(3.5, 1.0), 1.5, 2.0),
            (make_gaussian(1.0), 1.0, 2.0),
            (make_gaussian(3.0), 3.0, 2.0),
        ]
        for kernel, D, gamma in cases:
            assert kernel.asymptotics.D == pytest.approx(D, rel=1e-12)
            assert kernel.asymptotics.gamma == gamma
            assert kernel.asymptotics.has_log is False

    def test_leading_coefficient_against_gap_fit(self, shipped_kernel):
        # independent check: (lam - k(r)) / r^gamma approaches D
        k = shipped_kernel
        D, gamma = k.asymptotics.D, k.asymptotics.gamma
        for r in (1e-4, 1e-3, 1e-2):
            ratio = (k.lam - k.eval(r)) / r**gamma
            assert ratio == pytest.approx(D, rel=2e-2)

    def test_consistency_window(self, shipped_kernel):
        k = shipped_kernel
        D, gamma = k.asymptotics.D, k.asymptotics.gamma
        for r in (1e-3, 1e-4, 1e-5):
            assert abs(k.gap(r) / (D * r**gamma) - 1.0) <= 0.05


class TestSpecStrings:
    def test_parse_matern(self):
        k = parse_kernel_spec("matern:0.5")
        assert isinstance(k, RadialKernel)
        assert k.nu == 0.5 and k.scale == 1.0

    def test_parse_matern_with_scale_and_fraction(self):
        k = parse_kernel_spec("matern:3/2:2")
        assert k.nu == 1.5 and k.scale == 2.0

    def test_parse_gauss(self):
        assert parse_kernel_spec("gauss").scale == 1.0
        assert parse_kernel_spec("gauss:2.5").scale == 2.5

    def test_parse_asymptotic(self):
        a = parse_kernel_spec("asymptotic:1:2")
        assert a == AsymptoticData(1.0, 2.0, False)
        a = parse_kernel_spec("asymptotic:0.5:2:log")
        assert a == AsymptoticData(0.5, 2.0, True)

    def test_spec_string_round_trip(self, shipped_kernel):
        again = parse_kernel_spec(shipped_kernel.spec_string())
        assert again == shipped_kernel

    @pytest.mark.parametrize(
        "bad",
        ["", "matern", "matern:abc", "gauss:1:2", "asymptotic:1", "asymptotic:1:2:3:4",
         "wavelet:3", "matern:0.5:-1", "asymptotic:-1:2"],
    )
    def test_bad_specs_rejected(self, bad):
        with pytest.raises(ValueError):
            parse_kernel_spec(bad)


def test_shipped_kernel_set():
    kernels = shipped_kernels()
    assert [k.spec_string() for k in kernels] == [
        "matern:0.5:1", "matern:1.5:2", "matern:2.5:1", "gauss:1",
    ]
