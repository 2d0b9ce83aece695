"""
Particle systems on the line with hard or soft reflection.

d ordered particles; particle 1 is a Brownian motion with drift mu_1 and each
following particle is pushed away from the one behind it, either by local
time (hard reflection, the Brownian TASEP) or by the penalty drift
U'(Z_i - Z_{i-1}) (soft reflection, the O'Connell-Yor polymer when U' = e^{-y}).
"""

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict

import numpy as np

from ..errors import ConfigurationError, InputError
from .codec import decode_vector, encode_vector
from .model import ModelSpec, gap_covariance, tridiagonal_reflection
from .potential import PotentialSpec

PARTICLE_KEYS = frozenset({"d", "mu", "reflection", "potential"})


class Reflection(Enum):
    """How particles are kept ordered."""
    SOFT = "soft"
    HARD = "hard"


@dataclass(frozen=True, eq=False)
class ParticleConfig:
    """
    Particle-system parameterization.

    Attributes:
        d: Number of particles (at least 2)
        mu: Length-d particle drifts
        reflection: Hard (local time) or soft (penalty) interaction
        potential: Penalty used by soft reflection
    """
    d: int
    mu: np.ndarray
    reflection: Reflection = Reflection.SOFT
    potential: PotentialSpec = field(default_factory=PotentialSpec)

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        if not np.all(np.isfinite(mu)):
            raise InputError("Particle drifts must be finite")
        mu.setflags(write=False)
        object.__setattr__(self, 'mu', mu)
        if not isinstance(self.reflection, Reflection):
            object.__setattr__(self, 'reflection', _parse_reflection(self.reflection))
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 2:
            raise ConfigurationError(f"A particle system needs d >= 2, got {self.d}")
        object.__setattr__(self, 'd', int(self.d))
        if mu.shape != (self.d,):
            raise ConfigurationError(f"mu must have length {self.d}, got shape {mu.shape}")

    def with_potential(self, potential: PotentialSpec) -> "ParticleConfig":
        return ParticleConfig(self.d, self.mu, Reflection.SOFT, potential)

    def with_reflection(self, reflection: Reflection) -> "ParticleConfig":
        return ParticleConfig(self.d, self.mu, reflection, self.potential)

    def mu_tilde(self) -> np.ndarray:
        """Gap drifts mu_{i+1} - mu_i."""
        return np.diff(self.mu)

    def gap_model(self) -> ModelSpec:
        """The (d-1)-dimensional gap process as GRBM(tridiag(2,-1), mu_tilde, R_trid, U)."""
        m = self.d - 1
        return ModelSpec(m, gap_covariance(m), self.mu_tilde(), tridiagonal_reflection(m),
                         self.potential)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "mu": encode_vector(self.mu),
            "reflection": self.reflection.value,
            "potential": self.potential.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ParticleConfig":
        if not isinstance(data, dict):
            raise ConfigurationError("Particle document must be a mapping")
        unknown = set(data) - PARTICLE_KEYS
        if unknown:
            raise ConfigurationError(f"Unknown particle keys: {', '.join(sorted(unknown))}")
        if "d" not in data or "mu" not in data:
            raise ConfigurationError("Particle document needs 'd' and 'mu'")
        d = data["d"]
        if isinstance(d, bool) or not isinstance(d, int):
            raise ConfigurationError(f"d must be an integer, got {d!r}")
        return cls(
            d=d,
            mu=decode_vector(data["mu"], "mu"),
            reflection=_parse_reflection(data.get("reflection", Reflection.SOFT.value)),
            potential=PotentialSpec.from_dict(data.get("potential", {})),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ParticleConfig):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash(self.to_json())


def _parse_reflection(raw: Any) -> Reflection:
    try:
        return Reflection(str(raw).lower())
    except ValueError:
        raise ConfigurationError(
            f"Unsupported reflection: {raw}. Supported: soft, hard"
        ) from None
