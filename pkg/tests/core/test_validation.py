"""Tests for the assumption checks."""

import numpy as np
import pytest

from grbm.core.model import ModelSpec
from grbm.core.potential import PotentialSpec
from grbm.core.validation import CheckGrid, require_stable, validate_model
from grbm.errors import StabilityError


class TestValidateModel:
    def test_oconnell_yor_passes(self, oconnell_yor_d2):
        report = validate_model(oconnell_yor_d2)
        assert report.ok
        assert report.pd_ok and report.tridiag_ok and report.stability_ok
        assert report.potential_ok == {"3a": True, "3b": True, "3c": True}
        assert report.lambda_min == pytest.approx(1.0)

    def test_positive_drift_fails_stability(self):
        report = validate_model(ModelSpec.oconnell_yor([1.0, -1.0]))
        assert not report.ok
        assert not report.stability_ok
        assert any("Stability gate" in m for m in report.messages)

    def test_indefinite_covariance(self):
        spec = ModelSpec.oconnell_yor([-1.0, -1.0], gamma=[[1.0, 2.0], [2.0, 1.0]])
        report = validate_model(spec)
        assert not report.pd_ok
        assert report.lambda_min == pytest.approx(-1.0)

    def test_non_tridiagonal_reflection(self):
        spec = ModelSpec(2, np.eye(2), [-1.0, -1.0], np.eye(2))
        report = validate_model(spec)
        assert not report.tridiag_ok
        assert not report.ok

    def test_zero_potential_fails_potential_conditions(self, zero_potential_scalar):
        report = validate_model(zero_potential_scalar)
        assert not report.potential_ok["3b"]
        assert not report.potential_ok["3c"]
        assert any("test mode" in m for m in report.messages)

    def test_check_grid_scales_with_beta(self):
        steep = ModelSpec.oconnell_yor([-1.0, -1.0], beta=25.0)
        assert validate_model(steep, CheckGrid(n_points=201)).ok

    def test_report_serializes(self, oconnell_yor_d2):
        data = validate_model(oconnell_yor_d2).to_dict()
        assert data["ok"] is True
        assert isinstance(data["messages"], list)
        assert data["lipschitz_estimate"] > 0


class TestRequireStable:
    def test_stable_model_passes(self, oconnell_yor_d2):
        require_stable(oconnell_yor_d2)

    def test_zero_drift_component_fails(self):
        with pytest.raises(StabilityError):
            require_stable(ModelSpec.oconnell_yor([-1.0, 0.0]))
