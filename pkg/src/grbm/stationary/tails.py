"""Monte Carlo estimate of the stationary tail functional E_pi[V]."""

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np

from ..errors import PreconditionError
from ..lyapunov.bump import BUMP
from ..sim.noise import row_norms


@dataclass
class TailEstimate:
    """Sample mean of V with its standard error."""
    mean: float
    stderr: float
    n: int
    lam: float
    theorem_lambda: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def tail_functional(samples: np.ndarray, lam: float,
                    theorem_lambda: Optional[float] = None) -> TailEstimate:
    """
    Mean of V(x) = exp(lambda phi(|x|)) over near-stationary samples.

    Raises:
        PreconditionError: If lambda <= 0 or there are no samples
    """
    if not lam > 0:
        raise PreconditionError(f"lambda must be positive, got {lam}")
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    n = samples.shape[0]
    if n == 0:
        raise PreconditionError("tail_functional needs at least one sample")
    with np.errstate(over='ignore'):
        v = np.exp(lam * BUMP.phi(row_norms(samples)))
    mean = float(np.mean(v))
    stderr = float(np.std(v, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return TailEstimate(mean, stderr, n, float(lam), theorem_lambda)
