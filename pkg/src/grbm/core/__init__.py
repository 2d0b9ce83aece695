"""
Model parameterization, assumption checks and closed-form rate constants.
"""

from .potential import PotentialFamily, PotentialSpec, potential_eval
from .model import ModelSpec, check_skew_symmetry, spectral_norm, tridiagonal_reflection
from .particles import ParticleConfig, Reflection
from .validation import CheckGrid, ValidationReport, validate_model
from .rates import (
    RateConstants,
    RateScaling,
    drift_rate_bound,
    hard_rate_Kh,
    nu_vector,
    rate_constants,
    rate_scaling_table,
    soft_rate_Ks,
    theorem_lambda,
)

__all__ = [
    "PotentialFamily",
    "PotentialSpec",
    "potential_eval",
    "ModelSpec",
    "check_skew_symmetry",
    "spectral_norm",
    "tridiagonal_reflection",
    "ParticleConfig",
    "Reflection",
    "CheckGrid",
    "ValidationReport",
    "validate_model",
    "RateConstants",
    "RateScaling",
    "drift_rate_bound",
    "hard_rate_Kh",
    "nu_vector",
    "rate_constants",
    "rate_scaling_table",
    "soft_rate_Ks",
    "theorem_lambda",
]
