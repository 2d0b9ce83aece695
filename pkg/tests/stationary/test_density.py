"""Tests for the product-form stationary density and its quadrature."""

import math

import numpy as np
import pytest
from scipy import special

from grbm.core.model import ModelSpec, tridiagonal_reflection
from grbm.errors import ConfigurationError, DomainTooSmallError, NumericError, PreconditionError
from grbm.sim.ensemble import run_ensemble
from grbm.stationary.density import (
    Box,
    DensitySpec,
    auto_domain_1d,
    density_spec,
    marginal_cdf,
    marginal_density_spec,
    marginal_mode,
    marginal_normalizers,
    normalize_density,
    product_domain,
    product_log_density,
    stationary_weights,
)
from grbm.stationary.distances import ks_test_1d


class TestStationaryWeights:
    def test_scalar_model(self, scalar_model):
        assert stationary_weights(scalar_model).tolist() == [-1.0]

    def test_skew_model(self, skew_model_d2):
        assert np.allclose(stationary_weights(skew_model_d2), [-2.0, -1.0])

    def test_skew_symmetry_required(self, oconnell_yor_d2):
        with pytest.raises(PreconditionError, match="skew-symmetry"):
            stationary_weights(oconnell_yor_d2)

    def test_diagonal_scaling_required(self):
        gamma = np.array([[2.0, -0.5], [-0.5, 2.0]])
        spec = ModelSpec(2, gamma, [-1.0, -1.0], tridiagonal_reflection(2))
        with pytest.raises(PreconditionError, match="Gamma_ii = r_ii"):
            stationary_weights(spec)


class TestProductLogDensity:
    def test_value_at_origin(self, scalar_model):
        assert product_log_density(scalar_model, np.array([0.0])) == pytest.approx(-2.0)
        assert math.exp(product_log_density(scalar_model, np.array([0.0]))) == \
            pytest.approx(0.1353352832366127)

    def test_batch(self, skew_model_d2):
        x = np.array([[0.0, 0.0], [1.0, -1.0]])
        values = product_log_density(skew_model_d2, x)
        w = stationary_weights(skew_model_d2)
        expected = [2.0 * (-1.0 - 1.0), 2.0 * (-math.exp(-1.0) - math.e + w @ x[1])]
        assert np.allclose(values, expected)

    def test_density_spec_agrees(self, skew_model_d2):
        x = np.random.default_rng(0).normal(size=(10, 2))
        dspec = density_spec(skew_model_d2)
        assert np.allclose(dspec.log_density(x), product_log_density(skew_model_d2, x))
        assert dspec.model_digest == skew_model_d2.digest()


class TestNormalization:
    def test_scalar_model_normalizer(self, scalar_model):
        Z = normalize_density(marginal_density_spec(scalar_model, 0), Box.interval(-10.0, 40.0))
        assert Z == pytest.approx(0.25, rel=1e-9)

    def test_uniform_on_its_support(self):
        support = Box.interval(0.0, 1.0)
        dspec = DensitySpec("", 1, lambda x: np.zeros(x.shape[0]), support=support)
        assert normalize_density(dspec, support) == pytest.approx(1.0, rel=1e-12)
        assert dspec.Z == pytest.approx(1.0, rel=1e-12)
        assert dspec.pdf(np.array([[0.3]]))[0] == pytest.approx(1.0)

    def test_gaussian_in_two_dimensions(self):
        dspec = DensitySpec("", 2, lambda x: -0.5 * np.sum(x * x, axis=1))
        Z = normalize_density(dspec, Box((-10.0, -10.0), (10.0, 10.0)), n_quad=200)
        assert Z == pytest.approx(2.0 * math.pi, rel=1e-10)

    def test_joint_normalizer_is_product_of_marginals(self, skew_model_d2):
        joint = normalize_density(density_spec(skew_model_d2), product_domain(skew_model_d2),
                                  n_quad=400)
        marginals = marginal_normalizers(skew_model_d2)
        # Z_i = Gamma(-2 w_i) / 2^{-2 w_i} with w = (-2, -1)
        assert marginals == pytest.approx([6.0 / 16.0, 1.0 / 4.0], rel=1e-9)
        assert joint == pytest.approx(marginals[0] * marginals[1], rel=1e-6)

    def test_coarse_rule_is_refined(self):
        # one 16-node panel over [-10, 10] is far from 1e-8 accuracy on its own
        dspec = DensitySpec("", 1, lambda x: -0.5 * x[:, 0] ** 2)
        Z = normalize_density(dspec, Box.interval(-10.0, 10.0), n_quad=16)
        assert Z == pytest.approx(math.sqrt(2.0 * math.pi), rel=1e-10)

    def test_unconverged_rule_raises(self):
        support = Box.interval(0.0, 1.0)
        dspec = DensitySpec("", 1, lambda x: np.where(x[:, 0] < 1.0 / 3.0, 0.0, -50.0),
                            support=support)
        with pytest.raises(NumericError, match="not converged"):
            normalize_density(dspec, support, n_quad=16, max_nodes=256)
        assert dspec.Z is None

    def test_domain_too_small(self, scalar_model):
        with pytest.raises(DomainTooSmallError):
            normalize_density(marginal_density_spec(scalar_model, 0), Box.interval(-1.0, 1.0))

    def test_three_dimensions_unsupported(self):
        dspec = DensitySpec("", 3, lambda x: np.zeros(x.shape[0]))
        with pytest.raises(PreconditionError):
            normalize_density(dspec, Box((0.0,) * 3, (1.0,) * 3))

    def test_dimension_mismatch(self):
        dspec = DensitySpec("", 2, lambda x: np.zeros(x.shape[0]))
        with pytest.raises(ConfigurationError):
            normalize_density(dspec, Box.interval(0.0, 1.0))

    def test_pdf_before_normalization(self):
        with pytest.raises(PreconditionError):
            DensitySpec("", 1, lambda x: np.zeros(x.shape[0])).pdf(np.zeros((1, 1)))

    def test_box_needs_ordered_bounds(self):
        with pytest.raises(ConfigurationError):
            Box.interval(1.0, 1.0)


class TestMarginals:
    def test_mode(self, scalar_model, skew_model_d2):
        assert marginal_mode(scalar_model, 0) == pytest.approx(0.0)
        # e^{-y} = -w_1 = 2
        assert marginal_mode(skew_model_d2, 0) == pytest.approx(-math.log(2.0))

    def test_auto_domain_contains_mass(self, scalar_model):
        dspec = marginal_density_spec(scalar_model, 0)
        domain = auto_domain_1d(dspec.log_density, 0.0)
        assert domain.lower[0] < -2.0 and domain.upper[0] > 15.0

    def test_cdf_matches_closed_form(self, scalar_model):
        # e^{-X} ~ Gamma(2, rate 2), so P(X <= y) = Q(2, 2 e^{-y})
        cdf = marginal_cdf(scalar_model, 0)
        y = np.linspace(-2.0, 6.0, 17)
        assert np.allclose(cdf(y), special.gammaincc(2.0, 2.0 * np.exp(-y)), atol=1e-4)
        assert cdf.Z == pytest.approx(0.25, rel=1e-9)

    def test_cdf_limits(self, scalar_model):
        cdf = marginal_cdf(scalar_model, 0)
        assert cdf(np.array([-1e3]))[0] == 0.0
        assert cdf(np.array([1e3]))[0] == 1.0
        assert np.all(np.diff(cdf.values) >= 0)

    @pytest.mark.slow
    def test_long_run_samples_follow_the_marginal(self, scalar_model):
        ens = run_ensemble(scalar_model, 10_000, 1e-3, 10.0, 41, [0.0])
        assert ks_test_1d(ens.terminal_states[:, 0], marginal_cdf(scalar_model, 0), 0.01).passed
