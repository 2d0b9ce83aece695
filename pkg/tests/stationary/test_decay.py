"""Tests for TV decay fits and mixing curves."""

import numpy as np
import pytest

from grbm.errors import ConfigurationError, FitError
from grbm.stationary.decay import auto_fit_window, fit_decay_exponent, mixing_curve


class TestFitDecayExponent:
    def test_exact_exponential(self):
        t = np.arange(0.0, 20.0, 0.5)
        fit = fit_decay_exponent(t, 0.4 * np.exp(-0.3 * t))
        assert fit.delta == pytest.approx(0.3, rel=1e-10)
        assert fit.r2 == pytest.approx(1.0)
        assert fit.intercept == pytest.approx(np.log(0.4))
        assert not fit.low_r2

    def test_noisy_exponential(self):
        rng = np.random.default_rng(0)
        t = np.arange(0.0, 15.0, 0.25)
        tv = 0.45 * np.exp(-0.3 * t) * np.exp(rng.normal(0.0, 0.05, t.size))
        fit = fit_decay_exponent(t, tv)
        assert 0.27 <= fit.delta <= 0.33

    def test_flat_curve_has_low_r2(self):
        t = np.arange(0.0, 10.0, 1.0)
        fit = fit_decay_exponent(t, np.full(t.size, 0.1))
        assert fit.r2 == pytest.approx(0.0)
        assert fit.low_r2

    def test_points_outside_band_ignored(self):
        t = np.arange(0.0, 30.0, 1.0)
        tv = np.minimum(1.0, 2.0 * np.exp(-0.5 * t))
        tv[-5:] = 2e-4
        fit = fit_decay_exponent(t, tv)
        assert fit.delta == pytest.approx(0.5, rel=1e-10)
        assert fit.n_points == int(np.sum((tv > 1e-3) & (tv < 0.5)))

    def test_window(self):
        t = np.arange(0.0, 10.0, 0.5)
        tv = np.where(t < 5.0, 0.4 * np.exp(-0.2 * t), 0.4 * np.exp(-1.0 - 0.8 * (t - 5.0)))
        fit = fit_decay_exponent(t, tv, window=(0.0, 4.5))
        assert fit.delta == pytest.approx(0.2, rel=1e-10)
        assert fit.window == (0.0, 4.5)

    def test_too_few_points(self):
        with pytest.raises(FitError, match="at least 4"):
            fit_decay_exponent([0.0, 1.0, 2.0, 3.0], [0.4, 0.3, 0.2, 1e-5])

    def test_length_mismatch(self):
        with pytest.raises(ConfigurationError):
            fit_decay_exponent([0.0, 1.0], [0.4])

    def test_serialization(self):
        t = np.arange(0.0, 5.0, 0.5)
        data = fit_decay_exponent(t, 0.3 * np.exp(-t)).to_dict()
        assert set(data) == {"delta", "intercept", "r2", "window", "n_points", "low_r2"}


class TestAutoFitWindow:
    def test_stops_at_three_noise_floors(self):
        t = np.arange(0.0, 10.0, 1.0)
        tv = 0.5 * np.exp(-t)
        assert auto_fit_window(t, tv, noise_floor=0.01) == (0.0, 3.0)

    def test_whole_grid_when_floor_is_never_reached(self):
        t = np.arange(0.0, 5.0, 1.0)
        assert auto_fit_window(t, np.full(5, 0.4), noise_floor=0.01) == (0.0, 4.0)


class TestMixingCurve:
    def test_rejects_bad_grid(self, scalar_model):
        with pytest.raises(ConfigurationError):
            mixing_curve(scalar_model, ([0.0], [1.0]), [1.0, 0.5], 10, 0, 0.1)

    def test_deterministic(self, scalar_model):
        times = [0.0, 0.5, 1.0]
        a = mixing_curve(scalar_model, ([-2.0], [4.0]), times, 200, 3, 0.05)
        b = mixing_curve(scalar_model, ([-2.0], [4.0]), times, 200, 3, 0.05)
        assert np.array_equal(a.tv, b.tv)
        assert a.seeds == b.seeds and a.seeds[0] != a.seeds[1]
        assert a.observable == "joint_tv"

    def test_table(self, scalar_model):
        curve = mixing_curve(scalar_model, ([-2.0], [4.0]), [0.0, 0.5], 50, 3, 0.05)
        frame = curve.to_frame()
        assert list(frame.columns) == ["t", "tv", "n_paths"]
        assert frame["n_paths"].tolist() == [50, 50]

    def test_marginal_tv_above_two_dimensions(self, oconnell_yor_d3):
        curve = mixing_curve(oconnell_yor_d3, (np.zeros(3), np.ones(3)), [0.0, 0.2], 100, 1,
                             0.05)
        assert curve.observable == "marginal_tv"

    @pytest.mark.slow
    def test_scalar_model_mixes(self, scalar_model):
        times = np.arange(0.0, 8.5, 0.5)
        curve = mixing_curve(scalar_model, ([-2.0], [4.0]), times, 4000, 11, 0.01)
        assert curve.tv[0] == pytest.approx(1.0)
        assert curve.tv[-1] < 5.0 * curve.noise_floor
        assert curve.fit((0.0, 8.0)).delta > 0

    @pytest.mark.slow
    def test_gap_observable(self, hard_pair):
        times = np.arange(0.0, 4.25, 0.25)
        curve = mixing_curve(hard_pair, ([0.0, 0.0], [0.0, 4.0]), times, 2000, 2, 0.01,
                             observe_gaps=True)
        assert curve.tv[0] == pytest.approx(1.0)
        assert curve.tv[-1] < curve.tv[0]
