"""
Counter-based noise, time discretizations and deterministic ensembles.
"""

from .rng import derive_seed, gaussian_step_stream
from .noise import cholesky
from .integrators import (
    Scheme,
    Trajectory,
    gaps,
    simulate_grbm,
    simulate_hard_particles,
    simulate_soft_particles,
)
from .ensemble import Ensemble, Keep, run_ensemble

__all__ = [
    "derive_seed",
    "gaussian_step_stream",
    "cholesky",
    "Scheme",
    "Trajectory",
    "gaps",
    "simulate_grbm",
    "simulate_soft_particles",
    "simulate_hard_particles",
    "Ensemble",
    "Keep",
    "run_ensemble",
]
