"""Tests for the radial profile phi."""

import numpy as np
import pytest

from grbm.errors import PreconditionError
from grbm.lyapunov.bump import BUMP, bump_eval


class TestBumpProfile:
    def test_flat_inside_half_ball(self):
        assert bump_eval(0.0) == (0.0, 0.0, 0.0)
        assert bump_eval(0.5) == (0.0, 0.0, 0.0)

    def test_identity_outside_unit_ball(self):
        phi, dphi, ddphi = BUMP.evaluate(np.array([1.0, 2.5, 1e6]))
        assert np.array_equal(phi, [1.0, 2.5, 1e6])
        assert np.all(dphi == 1.0) and np.all(ddphi == 0.0)

    @pytest.mark.parametrize("knot", [0.5, 1.0])
    def test_twice_continuously_differentiable_at_knots(self, knot):
        h = 1e-7
        left = np.array(bump_eval(knot - h))
        right = np.array(bump_eval(knot + h))
        assert np.allclose(left, right, atol=1e-5)

    def test_derivatives_match_finite_differences(self):
        s = np.linspace(0.55, 0.95, 9)
        h = 1e-6
        phi, dphi, ddphi = BUMP.evaluate(s)
        assert np.allclose((BUMP.phi(s + h) - BUMP.phi(s - h)) / (2 * h), dphi, atol=1e-6)
        h = 1e-4
        fd2 = (BUMP.phi(s + h) - 2 * phi + BUMP.phi(s - h)) / h ** 2
        assert np.allclose(fd2, ddphi, atol=1e-3)

    def test_nondecreasing(self):
        phi = BUMP.phi(np.linspace(0.0, 3.0, 3001))
        assert np.all(np.diff(phi) >= 0)
        assert np.all(BUMP.evaluate(np.linspace(0.5, 1.0, 501))[1] >= 0)

    def test_negative_argument(self):
        with pytest.raises(PreconditionError):
            bump_eval(-1e-12)
