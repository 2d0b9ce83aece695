"""
The radial profile phi of the Lyapunov function V(x) = exp(lambda phi(||x||)).

phi vanishes on [0, 1/2], is the identity on [1, inf) and on (1/2, 1) is the
unique quintic matching value, slope and curvature at both ends, which makes
phi C^2. Writing t = 2s - 1, the quintic is p(t) = 8t^3 - 23/2 t^4 + 9/2 t^5;
p'(t) = t^2 (24 - 46t + 45/2 t^2) has negative discriminant, so phi is
increasing.
"""

from typing import Tuple, Union

import numpy as np

from ..errors import PreconditionError

ArrayLike = Union[float, np.ndarray]

_A, _B, _C = 8.0, -11.5, 4.5


class BumpProfile:
    """Evaluators for phi, phi' and phi''."""

    lower = 0.5
    upper = 1.0

    def evaluate(self, s: ArrayLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return (phi, phi', phi'') at s >= 0 (scalar or array)."""
        s = np.asarray(s, dtype=float)
        if np.any(s < 0) or np.any(np.isnan(s)):
            raise PreconditionError("phi is defined for s >= 0")

        t = np.clip(2.0 * s - 1.0, 0.0, 1.0)
        t2 = t * t
        p = t2 * t * (_A + t * (_B + t * _C))
        dp = t2 * (3 * _A + t * (4 * _B + t * 5 * _C))
        ddp = t * (6 * _A + t * (12 * _B + t * 20 * _C))

        # ds/dt = 1/2, so each derivative picks up a factor 2
        middle = (s > self.lower) & (s < self.upper)
        outer = s >= self.upper
        phi = np.where(outer, s, np.where(middle, p, 0.0))
        dphi = np.where(outer, 1.0, np.where(middle, 2.0 * dp, 0.0))
        ddphi = np.where(middle, 4.0 * ddp, 0.0)
        return phi, dphi, ddphi

    def phi(self, s: ArrayLike) -> np.ndarray:
        return self.evaluate(s)[0]


BUMP = BumpProfile()


def bump_eval(s: float) -> Tuple[float, float, float]:
    """
    Evaluate the profile at one point.

    Raises:
        PreconditionError: If s < 0
    """
    phi, dphi, ddphi = BUMP.evaluate(s)
    return float(phi), float(dphi), float(ddphi)
