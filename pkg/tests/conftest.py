"""Shared fixtures: small models, particle systems and config directories."""

from pathlib import Path

import numpy as np
import pytest
import yaml

from grbm.core.model import ModelSpec, tridiagonal_reflection
from grbm.core.particles import ParticleConfig, Reflection
from grbm.core.potential import PotentialSpec

REPO_ROOT = Path(__file__).resolve().parents[1]
EXPERIMENT_CONFIGS = REPO_ROOT / "config" / "experiments"


@pytest.fixture
def oconnell_yor_d2() -> ModelSpec:
    """Gamma = I, mu = (-1, -1), tridiagonal R, U' = e^{-y}."""
    return ModelSpec.oconnell_yor([-1.0, -1.0])


@pytest.fixture
def oconnell_yor_d3() -> ModelSpec:
    return ModelSpec.oconnell_yor([-1.0, -0.5, -2.0])


@pytest.fixture
def scalar_model() -> ModelSpec:
    """d = 1 with Gamma = R = 1 and mu = -1; stationary law is log-Gamma(2) with Z = 1/4."""
    return ModelSpec(1, [[1.0]], [-1.0], [[1.0]], PotentialSpec.exponential(1.0))


@pytest.fixture
def skew_model_d2() -> ModelSpec:
    """Tridiagonal R with Gamma_12 = -1/2, so r_ij + r_ji = 2 Gamma_ij holds."""
    gamma = np.array([[1.0, -0.5], [-0.5, 1.0]])
    return ModelSpec(2, gamma, [-1.0, -1.0], tridiagonal_reflection(2))


@pytest.fixture
def zero_potential_scalar() -> ModelSpec:
    return ModelSpec(1, [[1.0]], [-1.0], [[1.0]], PotentialSpec.zero())


@pytest.fixture
def hard_pair() -> ParticleConfig:
    """Two hard particles whose gap is reflected BM with drift -1 and variance 2."""
    return ParticleConfig(2, [0.0, -1.0], Reflection.HARD)


@pytest.fixture
def soft_triple() -> ParticleConfig:
    return ParticleConfig(3, [0.0, -1.0, -2.0], Reflection.SOFT)


@pytest.fixture
def write_config(tmp_path):
    """Write a config mapping as YAML and return its path."""
    def _write(data, name: str = "experiment.yaml") -> Path:
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(data, f, sort_keys=False)
        return path
    return _write


@pytest.fixture
def model_section():
    """O'Connell-Yor model in the config document format."""
    return {
        "d": 2,
        "gamma": [[1.0, 0.0], [0.0, 1.0]],
        "mu": [-1.0, -1.0],
        "refl": "tridiagonal",
        "potential": {"family": "exponential", "beta": 1.0},
    }
