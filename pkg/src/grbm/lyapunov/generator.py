"""
Generator of the GRBM applied to the Lyapunov function.

With psi(x) = phi(||x||) and V = exp(lambda psi),

    LV / V = 1/2 sum_ij Gamma_ij (lambda psi_ij + lambda^2 psi_i psi_j) + lambda b(x) . Dpsi,

where b(x) = mu + R U'(x). Working with the ratio LV/V keeps the certifier
finite far beyond the radius where V itself overflows. beta_d and gamma_d are
the directional drift functionals of the tridiagonal case.
"""

from typing import Tuple

import numpy as np

from ..constants import PD_TOL
from ..core.model import ModelSpec
from ..errors import PreconditionError
from .bump import BUMP


def lyapunov_V(x: np.ndarray, lam: float) -> float:
    """
    V(x) = exp(lambda phi(||x||)), always >= 1.

    Raises:
        PreconditionError: If lambda <= 0
    """
    if not lam > 0:
        raise PreconditionError(f"lambda must be positive, got {lam}")
    x = np.asarray(x, dtype=float)
    return float(np.exp(lam * BUMP.phi(np.linalg.norm(x))))


def psi_derivatives(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gradient and Hessian of psi(x) = phi(||x||).

    Both vanish identically on the ball of radius 1/2.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    r = float(np.linalg.norm(x))
    if r <= BUMP.lower:
        return np.zeros(d), np.zeros((d, d))
    _, dphi, ddphi = BUMP.evaluate(r)
    outer = np.outer(x, x)
    grad = dphi * x / r
    hess = ddphi * outer / r ** 2 + dphi * (np.eye(d) / r - outer / r ** 3)
    return grad, hess


def _require_structure(spec: ModelSpec) -> None:
    if not spec.gamma_min_eigenvalue > PD_TOL:
        raise PreconditionError("Generator needs a model with positive definite Gamma")


def generator_ratio(spec: ModelSpec, lam: float, x: np.ndarray) -> np.ndarray:
    """
    LV/V for a batch of states.

    Args:
        spec: Model with positive definite Gamma
        lam: Lyapunov exponent lambda > 0
        x: States of shape (n, d) or (d,)

    Returns:
        Array of shape (n,) (or a scalar array for a single state)
    """
    if not lam > 0:
        raise PreconditionError(f"lambda must be positive, got {lam}")
    _require_structure(spec)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)

    r = np.linalg.norm(x, axis=1)
    _, dphi, ddphi = BUMP.evaluate(r)
    active = r > BUMP.lower
    safe_r = np.where(active, r, 1.0)

    gx = x @ spec.gamma
    quad = np.sum(gx * x, axis=1)
    trace = float(np.trace(spec.gamma))

    # sum_ij Gamma_ij psi_ij and Dpsi^T Gamma Dpsi
    hess_term = ddphi * quad / safe_r ** 2 + dphi * (trace / safe_r - quad / safe_r ** 3)
    grad_term = dphi ** 2 * quad / safe_r ** 2
    drift_term = dphi * np.sum(spec.drift(x) * x, axis=1) / safe_r

    ratio = 0.5 * (lam * hess_term + lam ** 2 * grad_term) + lam * drift_term
    ratio = np.where(active, ratio, 0.0)
    return ratio[0] if single else ratio


def generator_apply(spec: ModelSpec, lam: float, x: np.ndarray) -> float:
    """
    Exact LV(x) for the Lyapunov function with exponent lambda.

    Raises:
        PreconditionError: If lambda <= 0 or Gamma is not positive definite
    """
    x = np.asarray(x, dtype=float)
    return float(generator_ratio(spec, lam, x)) * lyapunov_V(x, lam)


def beta_d(spec: ModelSpec, x: np.ndarray) -> np.ndarray:
    """
    Directional drift (mu_1 + U'(x_1)) x_1/|x| + sum_k (mu_k + U'(x_k) - U'(x_{k-1})) x_k/|x|.

    Accepts a state or a batch of states.

    Raises:
        PreconditionError: If some state is 0
    """
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0):
        raise PreconditionError("beta_d is undefined at x = 0")
    u = np.asarray(spec.potential.uprime(x))
    pushed = np.zeros_like(u)
    pushed[..., 1:] = u[..., :-1]
    return np.sum((spec.mu + u - pushed) * x, axis=-1) / r


def gamma_d(spec: ModelSpec, x: np.ndarray) -> np.ndarray:
    """
    Potential part of beta_d on the negative orthant:
    sum_{k<d} (x_k - x_{k+1}) U'(x_k)/|x| + x_d U'(x_d)/|x|.

    Raises:
        PreconditionError: If some coordinate is >= 0
    """
    x = np.asarray(x, dtype=float)
    if np.any(x >= 0):
        raise PreconditionError("gamma_d needs x < 0 componentwise")
    r = np.linalg.norm(x, axis=-1)
    u = np.asarray(spec.potential.uprime(x))
    gaps = np.zeros_like(x)
    gaps[..., :-1] = x[..., :-1] - x[..., 1:]
    gaps[..., -1] = x[..., -1]
    return np.sum(gaps * u, axis=-1) / r
