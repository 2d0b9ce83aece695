"""
Soft-reflection potentials.

The exponential family U_beta(y) = -(1/beta) exp(-beta y) is the penalty used by
the generalized Brownian queue in tandem (beta = 1 is the O'Connell-Yor choice);
letting beta grow recovers hard reflection. The zero potential exists only to
exercise plumbing in tests and deliberately fails the potential conditions.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Tuple, Union

import numpy as np

from ..constants import UPRIME_SATURATION
from ..errors import ConfigurationError
from .codec import format_real, parse_real

ArrayLike = Union[float, np.ndarray]

# exp(-beta*y) saturates once its exponent passes this value
_LOG_SATURATION = math.log(UPRIME_SATURATION)


class PotentialFamily(Enum):
    """Supported potential families."""
    EXPONENTIAL = "exponential"
    ZERO = "zero"


@dataclass(frozen=True)
class PotentialSpec:
    """
    A potential U together with its derivative U'.

    Attributes:
        family: Potential family
        beta: Inverse length scale of the penalty (ignored by the zero family)
    """
    family: PotentialFamily = PotentialFamily.EXPONENTIAL
    beta: float = 1.0

    def __post_init__(self):
        if not isinstance(self.family, PotentialFamily):
            object.__setattr__(self, 'family', _parse_family(self.family))
        if not math.isfinite(self.beta) or self.beta <= 0:
            raise ConfigurationError(f"Potential beta must be a positive real, got {self.beta}")

    @classmethod
    def exponential(cls, beta: float = 1.0) -> "PotentialSpec":
        return cls(PotentialFamily.EXPONENTIAL, float(beta))

    @classmethod
    def zero(cls) -> "PotentialSpec":
        return cls(PotentialFamily.ZERO, 1.0)

    def value(self, y: ArrayLike) -> ArrayLike:
        """U(y), saturating instead of overflowing."""
        if self.family is PotentialFamily.ZERO:
            return np.zeros_like(np.asarray(y, dtype=float))[()]
        return -self.uprime(y) / self.beta

    def uprime(self, y: ArrayLike) -> ArrayLike:
        """U'(y) = exp(-beta y), capped at UPRIME_SATURATION."""
        y = np.asarray(y, dtype=float)
        if self.family is PotentialFamily.ZERO:
            return np.zeros_like(y)[()]
        exponent = np.minimum(-self.beta * y, _LOG_SATURATION)
        return np.exp(exponent)[()]

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {"family": self.family.value, "beta": format_real(self.beta)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PotentialSpec":
        """Create PotentialSpec from dictionary."""
        unknown = set(data) - {"family", "beta"}
        if unknown:
            raise ConfigurationError(f"Unknown potential keys: {', '.join(sorted(unknown))}")
        family = _parse_family(data.get("family", PotentialFamily.EXPONENTIAL.value))
        beta = parse_real(data.get("beta", 1.0), "potential.beta")
        return cls(family, beta)


def potential_eval(pspec: PotentialSpec, y: float) -> Tuple[float, float]:
    """
    Evaluate (U(y), U'(y)) for a potential.

    Args:
        pspec: Potential specification
        y: Finite evaluation point

    Returns:
        Tuple (U, U'). Never NaN: very negative y saturates U' at 1e300.
    """
    return float(pspec.value(y)), float(pspec.uprime(y))


def _parse_family(raw: Any) -> PotentialFamily:
    try:
        return PotentialFamily(str(raw).lower())
    except ValueError:
        allowed = ', '.join(f.value for f in PotentialFamily)
        raise ConfigurationError(
            f"Unsupported potential family: {raw}. Supported families: {allowed}"
        ) from None


