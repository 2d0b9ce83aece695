"""
Lyapunov function, generator evaluation and the sampled drift certificate.
"""

from .bump import BUMP, BumpProfile, bump_eval
from .generator import (
    beta_d,
    gamma_d,
    generator_apply,
    generator_ratio,
    lyapunov_V,
    psi_derivatives,
)
from .certificate import DriftReport, search_drift_radius, verify_drift

__all__ = [
    "BUMP",
    "BumpProfile",
    "bump_eval",
    "lyapunov_V",
    "psi_derivatives",
    "generator_apply",
    "generator_ratio",
    "beta_d",
    "gamma_d",
    "DriftReport",
    "verify_drift",
    "search_drift_radius",
]
