"""Tests for the sampled drift certificate."""

import numpy as np
import pytest

from grbm.core.model import ModelSpec
from grbm.core.rates import drift_rate_bound
from grbm.errors import ConfigurationError, PreconditionError, StabilityError
from grbm.lyapunov.certificate import sample_annulus, search_drift_radius, verify_drift


class TestSampleAnnulus:
    def test_radii_inside_bounds(self):
        x = sample_annulus(3, np.arange(2000, dtype=np.uint64), 3, 2.0, 5.0)
        r = np.linalg.norm(x, axis=1)
        assert x.shape == (2000, 3)
        assert np.all((r >= 2.0) & (r <= 5.0))

    def test_rows_are_stable(self):
        full = sample_annulus(3, np.arange(100, dtype=np.uint64), 2, 0.0, 1.0)
        tail = sample_annulus(3, np.arange(60, 100, dtype=np.uint64), 2, 0.0, 1.0)
        assert np.array_equal(full[60:], tail)


class TestVerifyDrift:
    def test_oconnell_yor_accepted(self, oconnell_yor_d2):
        report = verify_drift(oconnell_yor_d2, 0.5, 16.0, 160.0, n=20_000, seed=7)
        assert report.accepted
        assert report.violation_count == 0
        assert report.k >= report.k_target
        assert report.k_target == pytest.approx(drift_rate_bound(oconnell_yor_d2, 0.05))
        assert report.k >= 0.2
        assert np.isfinite(report.b)

    def test_zero_potential_rejected(self, zero_potential_scalar):
        # the shell direction x < 0 pushes V up at rate lambda
        report = verify_drift(zero_potential_scalar, 0.5, 16.0, 160.0, n=4000, seed=1)
        assert not report.accepted
        assert report.k < 0
        assert report.violation_count > 0

    def test_deterministic(self, oconnell_yor_d2):
        a = verify_drift(oconnell_yor_d2, 0.5, 16.0, 160.0, n=5000, seed=11)
        b = verify_drift(oconnell_yor_d2, 0.5, 16.0, 160.0, n=5000, seed=11)
        assert a.to_dict() == b.to_dict()
        assert np.array_equal(a.ratios, b.ratios)

    def test_independent_of_worker_count(self, oconnell_yor_d2):
        serial = verify_drift(oconnell_yor_d2, 0.5, 16.0, 160.0, n=10_000, seed=5, workers=1)
        parallel = verify_drift(oconnell_yor_d2, 0.5, 16.0, 160.0, n=10_000, seed=5, workers=2)
        assert serial.to_dict() == parallel.to_dict()
        assert np.array_equal(serial.radii, parallel.radii)

    def test_samples_table(self, oconnell_yor_d2, tmp_path):
        report = verify_drift(oconnell_yor_d2, 0.5, 16.0, 160.0, n=50, seed=2)
        path = tmp_path / "drift_samples.csv"
        report.samples_to_csv(path)
        lines = path.read_text().split("\n")
        assert lines[0] == "idx,radius,lv_over_v"
        assert len([line for line in lines if line]) == 51

    def test_unstable_model(self):
        with pytest.raises(StabilityError):
            verify_drift(ModelSpec.oconnell_yor([-1.0, 1.0]), 0.5, 16.0, 160.0, n=10)

    def test_bad_radii(self, oconnell_yor_d2):
        with pytest.raises(ConfigurationError):
            verify_drift(oconnell_yor_d2, 0.5, 16.0, 8.0, n=10)

    def test_bad_lambda(self, oconnell_yor_d2):
        with pytest.raises(PreconditionError):
            verify_drift(oconnell_yor_d2, 0.0, 16.0, 160.0, n=10)

    def test_report_is_never_rigorous(self, oconnell_yor_d2):
        data = verify_drift(oconnell_yor_d2, 0.5, 16.0, 160.0, n=100).to_dict()
        assert data["rigorous"] is False


class TestRadiusSearch:
    def test_accepts_at_first_radius(self, oconnell_yor_d2):
        report, history = search_drift_radius(oconnell_yor_d2, 0.5, n=5000, seed=7)
        assert report.accepted
        assert len(history) == 1
        assert report.r == 16.0 and report.shell_outer == 160.0

    def test_doubles_until_limit(self, zero_potential_scalar):
        report, history = search_drift_radius(zero_potential_scalar, 0.5, n=500, seed=7,
                                              r_start=16.0, r_limit=64.0)
        assert not report.accepted
        assert [h.r for h in history] == [16.0, 32.0, 64.0]

    def test_start_beyond_limit(self, oconnell_yor_d2):
        with pytest.raises(ConfigurationError):
            search_drift_radius(oconnell_yor_d2, 0.5, n=10, r_start=32.0, r_limit=16.0)
