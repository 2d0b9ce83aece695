"""
GRBM model parameterization.

A generalized reflected Brownian motion GRBM(Gamma, mu, R, U) solves

    dX_t = dB_t + (mu + R U'(X_t)) dt,

where B has covariance Gamma, R is the reflection matrix (unit diagonal) and
U'(X_t) is applied coordinatewise. This module holds the immutable ModelSpec,
its JSON document format and the matrix helpers shared by every other module.
"""

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Optional

import numpy as np

from ..constants import (
    POWER_ITERATION_MAX_ITER,
    POWER_ITERATION_RTOL,
    SYMMETRY_TOL,
    TRIDIAGONAL_TOL,
)
from ..errors import ConfigurationError, InputError, NumericError
from .codec import decode_matrix, decode_vector, encode_matrix, encode_vector
from .potential import PotentialSpec

MODEL_KEYS = frozenset({"d", "gamma", "mu", "refl", "potential"})


def tridiagonal_reflection(d: int) -> np.ndarray:
    """Queue-in-tandem reflection matrix: ones on the diagonal, -1 just below it."""
    if d < 1:
        raise ConfigurationError(f"Dimension must be positive, got {d}")
    return np.eye(d) - np.eye(d, k=-1)


def gap_covariance(m: int) -> np.ndarray:
    """Covariance of consecutive differences of m+1 independent unit Brownian motions."""
    return 2.0 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """
    Full GRBM parameterization.

    Attributes:
        d: State dimension
        gamma: d x d noise covariance
        mu: Length-d drift vector
        refl: d x d reflection matrix with unit diagonal
        potential: Soft-reflection potential
    """
    d: int
    gamma: np.ndarray
    mu: np.ndarray
    refl: np.ndarray
    potential: PotentialSpec = field(default_factory=PotentialSpec)

    def __post_init__(self):
        gamma = _frozen(self.gamma, "gamma")
        mu = _frozen(self.mu, "mu")
        refl = _frozen(self.refl, "refl")
        object.__setattr__(self, 'gamma', gamma)
        object.__setattr__(self, 'mu', mu)
        object.__setattr__(self, 'refl', refl)

        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 1:
            raise ConfigurationError(f"Dimension d must be a positive integer, got {self.d}")
        object.__setattr__(self, 'd', int(self.d))
        d = self.d
        if gamma.shape != (d, d):
            raise ConfigurationError(f"gamma must be {d}x{d}, got shape {gamma.shape}")
        if refl.shape != (d, d):
            raise ConfigurationError(f"refl must be {d}x{d}, got shape {refl.shape}")
        if mu.shape != (d,):
            raise ConfigurationError(f"mu must have length {d}, got shape {mu.shape}")
        if not isinstance(self.potential, PotentialSpec):
            raise ConfigurationError("potential must be a PotentialSpec")

        if np.max(np.abs(gamma - gamma.T)) > SYMMETRY_TOL:
            raise ConfigurationError("gamma must be symmetric")
        if not np.all(np.diag(refl) == 1.0):
            raise ConfigurationError("refl must have unit diagonal (r_ii = 1)")

    @classmethod
    def oconnell_yor(
        cls,
        mu: Any,
        gamma: Optional[Any] = None,
        beta: float = 1.0,
    ) -> "ModelSpec":
        """Tridiagonal R with the exponential potential (Gamma = I unless given)."""
        mu = np.asarray(mu, dtype=float)
        d = mu.shape[0]
        gamma = np.eye(d) if gamma is None else np.asarray(gamma, dtype=float)
        return cls(d, gamma, mu, tridiagonal_reflection(d), PotentialSpec.exponential(beta))

    def drift(self, x: np.ndarray) -> np.ndarray:
        """b(x) = mu + R U'(x) for a state or a batch of states (last axis = d)."""
        u = self.potential.uprime(np.asarray(x, dtype=float))
        return self.mu + u @ self.refl.T

    @property
    def is_tridiagonal(self) -> bool:
        return bool(np.max(np.abs(self.refl - tridiagonal_reflection(self.d))) <= TRIDIAGONAL_TOL)

    @cached_property
    def gamma_norm(self) -> float:
        return spectral_norm(self.gamma)

    @cached_property
    def gamma_min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.gamma)[0])

    def to_dict(self) -> Dict[str, Any]:
        """Convert to the JSON document format."""
        refl: Any = encode_matrix(self.refl)
        if np.array_equal(self.refl, tridiagonal_reflection(self.d)):
            refl = "tridiagonal"
        return {
            "d": self.d,
            "gamma": encode_matrix(self.gamma),
            "mu": encode_vector(self.mu),
            "refl": refl,
            "potential": self.potential.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelSpec":
        """Create ModelSpec from its JSON document."""
        if not isinstance(data, dict):
            raise ConfigurationError("Model document must be a mapping")
        unknown = set(data) - MODEL_KEYS
        if unknown:
            raise ConfigurationError(f"Unknown model keys: {', '.join(sorted(unknown))}")
        missing = {"d", "mu"} - set(data)
        if missing:
            raise ConfigurationError(f"Missing model keys: {', '.join(sorted(missing))}")

        d = data["d"]
        if isinstance(d, bool) or not isinstance(d, int) or d < 1:
            raise ConfigurationError(f"d must be a positive integer, got {d!r}")
        mu = decode_vector(data["mu"], "mu")
        gamma = decode_matrix(data["gamma"], "gamma") if "gamma" in data else np.eye(d)

        raw_refl = data.get("refl", "tridiagonal")
        if isinstance(raw_refl, str):
            if raw_refl != "tridiagonal":
                raise ConfigurationError(
                    f"Unknown reflection shorthand: {raw_refl}. Use 'tridiagonal' or a matrix"
                )
            refl = tridiagonal_reflection(d)
        else:
            refl = decode_matrix(raw_refl, "refl")

        potential = PotentialSpec.from_dict(data.get("potential", {}))
        return cls(d, gamma, mu, refl, potential)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "ModelSpec":
        return cls.from_dict(json.loads(text))

    def digest(self) -> str:
        """SHA-256 of the canonical JSON document."""
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModelSpec):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash(self.to_json())


def spectral_norm(gamma: np.ndarray) -> float:
    """
    Largest singular value by power iteration on Gamma^T Gamma.

    Args:
        gamma: Square matrix with finite entries

    Returns:
        ||Gamma|| = sup{||Gamma x||; ||x|| = 1}

    Raises:
        InputError: If gamma has non-finite entries
        NumericError: If the iteration does not reach relative tolerance 1e-12
    """
    a = np.asarray(gamma, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigurationError(f"Expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("Matrix has non-finite entries")
    m = a.T @ a
    if not np.any(m):
        return 0.0

    # A fixed generic start avoids landing orthogonal to the top eigenvector
    v = np.random.default_rng(0).standard_normal(a.shape[0])
    v /= np.linalg.norm(v)
    estimate = float(v @ m @ v)
    for _ in range(POWER_ITERATION_MAX_ITER):
        w = m @ v
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            return 0.0
        v = w / norm_w
        updated = float(v @ m @ v)
        if abs(updated - estimate) <= POWER_ITERATION_RTOL * abs(updated):
            return float(np.sqrt(updated))
        estimate = updated
    raise NumericError(
        f"Power iteration did not converge after {POWER_ITERATION_MAX_ITER} iterations"
    )


def check_skew_symmetry(gamma: np.ndarray, refl: np.ndarray, tol: float = 0.0) -> bool:
    """
    Generalized skew-symmetry condition r_ij + r_ji = 2 Gamma_ij for i != j.

    Args:
        gamma: Covariance matrix
        refl: Reflection matrix
        tol: Absolute tolerance on every off-diagonal pair

    Returns:
        True iff the condition holds within tol
    """
    gamma = np.asarray(gamma, dtype=float)
    refl = np.asarray(refl, dtype=float)
    if gamma.shape != refl.shape or gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1]:
        raise ConfigurationError(
            f"gamma and refl must be square of equal shape, got {gamma.shape} and {refl.shape}"
        )
    residual = np.abs(refl + refl.T - 2.0 * gamma)
    np.fill_diagonal(residual, 0.0)
    return bool(np.all(residual <= tol))


def _frozen(raw: Any, name: str) -> np.ndarray:
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name} must be numeric") from None
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr
