"""
Closed-form rate constants.

drift_rate_bound is the contraction rate of the exponential drift condition
for a stable GRBM. hard_rate_Kh and soft_rate_Ks are the corresponding rates
for the gap processes of the hard-reflection (Brownian TASEP) and
soft-reflection particle systems; as d grows K^h decays like d^-7 while K^s
only decays like d^-1.
"""

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from ..errors import ConfigurationError, PreconditionError, StabilityError
from .model import ModelSpec
from .particles import ParticleConfig
from .validation import require_stable

MU_PATTERNS = ("unit", "linear", "constant")


@dataclass
class RateConstants:
    """Rate constants of a particle system and its gap GRBM."""
    gamma_norm: float
    drift_bound: Optional[float]
    k_hard: Optional[float]
    k_soft: Optional[float]
    nu: List[float]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def theorem_lambda(spec: ModelSpec) -> float:
    """Exponent of the Lyapunov function used by the drift theorem: -mu_min/(d ||Gamma||)."""
    mu_min = float(np.min(np.abs(spec.mu)))
    return mu_min / (spec.d * spec.gamma_norm)


def drift_rate_bound(spec: ModelSpec, eps: float = 0.0) -> float:
    """
    Contraction rate (min_i |mu_i|^2 - eps) / (2 d ||Gamma||), clamped at 0.

    Raises:
        StabilityError: If mu is not componentwise negative
    """
    if eps < 0:
        raise PreconditionError(f"eps must be >= 0, got {eps}")
    require_stable(spec)
    mu_min_sq = float(np.min(spec.mu ** 2))
    return max(0.0, (mu_min_sq - eps) / (2.0 * spec.d * spec.gamma_norm))


def nu_vector(mu: Sequence[float]) -> np.ndarray:
    """
    Centered partial sums nu_i = sum_{k<=i} mu_k - (i/d) sum_k mu_k, 1 <= i <= d-1.

    Raises:
        PreconditionError: If d < 2
    """
    mu = np.asarray(mu, dtype=float)
    d = mu.shape[0]
    if d < 2:
        raise PreconditionError(f"nu is defined for d >= 2, got d = {d}")
    i = np.arange(1, d)
    return np.cumsum(mu)[:-1] - (i / d) * np.sum(mu)


def hard_rate_Kh(mu: Sequence[float]) -> float:
    """
    Drift rate K^h of the Brownian TASEP gap process.

    Raises:
        StabilityError: If some nu_i >= 0
    """
    nu = nu_vector(mu)
    if np.any(nu >= 0):
        raise StabilityError(f"Hard-reflection gaps need nu < 0, got nu = {nu.tolist()}")
    d = len(mu)
    c = math.cos(math.pi / d)
    return (4.0 / d) * (1.0 - c) ** 3 / (1.0 + c) * float(np.min(nu ** 2))


def soft_rate_Ks(mu_tilde: Sequence[float], d: int) -> float:
    """
    Drift rate K^s of the soft-reflection gap process.

    d is the particle count; mu_tilde has d - 1 entries.

    Raises:
        StabilityError: If some mu_tilde_i >= 0
    """
    mu_tilde = np.asarray(mu_tilde, dtype=float)
    if mu_tilde.shape != (d - 1,):
        raise ConfigurationError(
            f"mu_tilde must have d - 1 = {d - 1} entries, got shape {mu_tilde.shape}"
        )
    if np.any(mu_tilde >= 0):
        raise StabilityError(f"Soft-reflection gaps need mu_tilde < 0, got {mu_tilde.tolist()}")
    c = math.cos(math.pi / d)
    return float(np.min(mu_tilde ** 2)) / (4.0 * d * (1.0 + c))


def rate_constants(config: ParticleConfig) -> RateConstants:
    """Collect every rate constant of a particle system; failed hypotheses give None."""
    gap = config.gap_model()
    nu = nu_vector(config.mu)

    def _attempt(fn, *args):
        try:
            return fn(*args)
        except StabilityError:
            return None

    return RateConstants(
        gamma_norm=gap.gamma_norm,
        drift_bound=_attempt(drift_rate_bound, gap),
        k_hard=_attempt(hard_rate_Kh, config.mu),
        k_soft=_attempt(soft_rate_Ks, config.mu_tilde(), config.d),
        nu=nu.tolist(),
    )


def pattern_drifts(d: int, pattern: str) -> Dict[str, np.ndarray]:
    """
    Particle drifts for the hard and soft systems of a rate-scaling pattern.

    unit: hard mu = (-1, 0, ..., 0, 1) so nu = -1; soft mu_i = -(i-1) so mu_tilde = -1.
    linear: hard mu_i = i; soft mu_i = -i.
    constant: mu = -1 for both (nu = 0 and mu_tilde = 0, never stable).
    """
    if pattern not in MU_PATTERNS:
        raise ConfigurationError(
            f"Unknown mu pattern: {pattern}. Supported patterns: {', '.join(MU_PATTERNS)}"
        )
    i = np.arange(1, d + 1, dtype=float)
    if pattern == "unit":
        hard = np.zeros(d)
        hard[0], hard[-1] = -1.0, 1.0
        return {"hard": hard, "soft": -(i - 1.0)}
    if pattern == "linear":
        return {"hard": i, "soft": -i}
    return {"hard": -np.ones(d), "soft": -np.ones(d)}


@dataclass
class RateScaling:
    """K^h and K^s over a list of particle counts, with log-log slopes."""
    d: List[int]
    k_hard: List[float]
    k_soft: List[float]
    slope_hard: Optional[float]
    slope_soft: Optional[float]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def rate_scaling_table(d_list: Sequence[int], mu_pattern: str = "unit") -> RateScaling:
    """
    Evaluate K^h and K^s for each d and fit log K against log d.

    Raises:
        StabilityError: If the pattern is unstable for some d
    """
    ds = sorted({int(d) for d in d_list})
    if not ds or ds[0] < 2:
        raise ConfigurationError(f"d_list needs particle counts >= 2, got {list(d_list)}")
    k_hard, k_soft = [], []
    for d in ds:
        drifts = pattern_drifts(d, mu_pattern)
        k_hard.append(hard_rate_Kh(drifts["hard"]))
        k_soft.append(soft_rate_Ks(np.diff(drifts["soft"]), d))

    slope_hard = slope_soft = None
    if len(ds) >= 2:
        log_d = np.log(ds)
        slope_hard = float(stats.linregress(log_d, np.log(k_hard)).slope)
        slope_soft = float(stats.linregress(log_d, np.log(k_soft)).slope)
    return RateScaling(ds, k_hard, k_soft, slope_hard, slope_soft)
