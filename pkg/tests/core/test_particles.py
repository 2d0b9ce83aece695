"""Tests for particle-system configs and their gap models."""

import numpy as np
import pytest

from grbm.core.model import gap_covariance
from grbm.core.particles import ParticleConfig, Reflection
from grbm.core.potential import PotentialSpec
from grbm.errors import ConfigurationError


class TestParticleConfig:
    def test_mu_tilde(self, soft_triple):
        assert np.array_equal(soft_triple.mu_tilde(), [-1.0, -1.0])

    def test_gap_model(self, soft_triple):
        gap = soft_triple.gap_model()
        assert gap.d == 2
        assert np.array_equal(gap.gamma, gap_covariance(2))
        assert np.array_equal(gap.mu, [-1.0, -1.0])
        assert gap.is_tridiagonal
        assert gap.potential == soft_triple.potential

    def test_needs_two_particles(self):
        with pytest.raises(ConfigurationError, match="d >= 2"):
            ParticleConfig(1, [0.0])

    def test_reflection_parsed_from_string(self):
        assert ParticleConfig(2, [0.0, -1.0], "HARD").reflection is Reflection.HARD

    def test_unknown_reflection(self):
        with pytest.raises(ConfigurationError, match="Supported: soft, hard"):
            ParticleConfig(2, [0.0, -1.0], "sticky")

    def test_with_potential_switches_to_soft(self, hard_pair):
        soft = hard_pair.with_potential(PotentialSpec.exponential(8.0))
        assert soft.reflection is Reflection.SOFT
        assert soft.potential.beta == 8.0
        assert np.array_equal(soft.mu, hard_pair.mu)

    def test_document_round_trip(self, hard_pair):
        restored = ParticleConfig.from_dict(hard_pair.to_dict())
        assert restored == hard_pair
        assert restored.digest() == hard_pair.digest()

    def test_unknown_key(self):
        with pytest.raises(ConfigurationError, match="Unknown particle keys"):
            ParticleConfig.from_dict({"d": 2, "mu": [0, -1], "gamma": 1})
