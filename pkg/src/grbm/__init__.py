"""
GRBM ergodicity toolkit

Simulation and numerical verification for generalized reflected Brownian
motions: assumption checks, sampled drift certificates, product-form
stationary laws, mixing-rate estimates and the hard-versus-soft reflection
rate comparison for particle systems.
"""

__version__ = "0.1.0"

from .core.potential import PotentialFamily, PotentialSpec
from .core.model import ModelSpec, check_skew_symmetry, spectral_norm
from .core.particles import ParticleConfig, Reflection
from .core.validation import CheckGrid, ValidationReport, validate_model
from .core.rates import (
    drift_rate_bound,
    hard_rate_Kh,
    rate_scaling_table,
    soft_rate_Ks,
    theorem_lambda,
)

from .lyapunov.generator import beta_d, gamma_d, generator_apply, lyapunov_V
from .lyapunov.certificate import DriftReport, search_drift_radius, verify_drift

from .sim.integrators import (
    Scheme,
    Trajectory,
    gaps,
    simulate_grbm,
    simulate_hard_particles,
    simulate_soft_particles,
)
from .sim.ensemble import Ensemble, Keep, run_ensemble

from .stationary.decay import DecayFit, fit_decay_exponent, mixing_curve
from .stationary.density import DensitySpec, normalize_density, product_log_density
from .stationary.penalty import PenaltyTable, penalty_sweep

# Import constants and errors modules for easy access
from . import constants, errors

__all__ = [
    # Version
    "__version__",

    # Model
    "PotentialFamily",
    "PotentialSpec",
    "ModelSpec",
    "check_skew_symmetry",
    "spectral_norm",
    "ParticleConfig",
    "Reflection",
    "CheckGrid",
    "ValidationReport",
    "validate_model",
    "drift_rate_bound",
    "hard_rate_Kh",
    "soft_rate_Ks",
    "rate_scaling_table",
    "theorem_lambda",

    # Lyapunov
    "lyapunov_V",
    "generator_apply",
    "beta_d",
    "gamma_d",
    "DriftReport",
    "verify_drift",
    "search_drift_radius",

    # Simulation
    "Scheme",
    "Trajectory",
    "gaps",
    "simulate_grbm",
    "simulate_soft_particles",
    "simulate_hard_particles",
    "Ensemble",
    "Keep",
    "run_ensemble",

    # Stationary analysis
    "DensitySpec",
    "product_log_density",
    "normalize_density",
    "DecayFit",
    "fit_decay_exponent",
    "mixing_curve",
    "PenaltyTable",
    "penalty_sweep",

    # Modules
    "constants",
    "errors",
]
