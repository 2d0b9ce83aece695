"""
Numerical checks of the standing assumptions on (Gamma, mu, R, U).

Every check is a finite sample rather than a proof: positive definiteness from
the smallest eigenvalue, the queue-in-tandem shape of R, the three potential
conditions on a grid scaled by 1/beta and the stability gate mu < 0.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List

import numpy as np

from ..constants import (
    DEFAULT_GRID_POINTS,
    DIVERGING_THRESHOLD,
    PD_TOL,
    GRID_HALF_WIDTH,
    VANISHING_THRESHOLD,
)
from ..errors import StabilityError
from .model import ModelSpec
from .potential import PotentialFamily

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckGrid:
    """
    Sampling descriptor for the potential and growth checks.

    Attributes:
        n_points: Grid points on [-half_width/beta, half_width/beta]
        half_width: Grid half width in units of 1/beta
        n_directions: Random directions for the Khasminskii growth check
        seed: Seed for the growth-check directions
    """
    n_points: int = DEFAULT_GRID_POINTS
    half_width: float = GRID_HALF_WIDTH
    n_directions: int = 256
    seed: int = 0


@dataclass
class ValidationReport:
    """Per-condition outcome of validate_model."""
    pd_ok: bool
    lambda_min: float
    tridiag_ok: bool
    potential_ok: Dict[str, bool]
    stability_ok: bool
    khasminskii_constant: float
    lipschitz_estimate: float
    messages: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.pd_ok and self.tridiag_ok and all(self.potential_ok.values())
                and self.stability_ok)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["ok"] = self.ok
        return data


def validate_model(spec: ModelSpec, check_grid: CheckGrid = CheckGrid()) -> ValidationReport:
    """
    Check the assumptions of the exponential drift theorem on a model.

    Args:
        spec: Model to check (dimension and finiteness are enforced by ModelSpec itself)
        check_grid: Potential/growth check grid

    Returns:
        ValidationReport with one boolean per condition and readable findings
    """
    messages: List[str] = []

    lambda_min = spec.gamma_min_eigenvalue
    pd_ok = lambda_min > PD_TOL
    if not pd_ok:
        messages.append(f"Gamma is not strictly positive definite (lambda_min = {lambda_min:.6g})")

    tridiag_ok = spec.is_tridiagonal
    if not tridiag_ok:
        messages.append("R is not the queue-in-tandem tridiagonal matrix")

    potential_ok = _check_potential(spec, check_grid, messages)

    stability_ok = bool(np.all(spec.mu < 0))
    if not stability_ok:
        bad = [i + 1 for i, m in enumerate(spec.mu) if m >= 0]
        messages.append(f"Stability gate fails: mu_i >= 0 for i in {bad}")

    khasminskii = _khasminskii_constant(spec, check_grid)
    lipschitz = _lipschitz_constant(spec, check_grid)
    messages.append(f"Growth check: sup x.b(x)/(1+|x|^2) ~ {khasminskii:.6g}")
    messages.append(f"U' Lipschitz estimate on the grid: K ~ {lipschitz:.6g}")

    report = ValidationReport(
        pd_ok=bool(pd_ok),
        lambda_min=lambda_min,
        tridiag_ok=tridiag_ok,
        potential_ok=potential_ok,
        stability_ok=stability_ok,
        khasminskii_constant=khasminskii,
        lipschitz_estimate=lipschitz,
        messages=messages,
    )
    logger.debug(f"Validated model {spec.digest()[:12]}: ok={report.ok}")
    return report


def require_stable(spec: ModelSpec) -> None:
    """Raise StabilityError unless mu < 0 componentwise."""
    if not np.all(spec.mu < 0):
        raise StabilityError(f"Stability gate fails: mu = {spec.mu.tolist()} is not < 0")


def _grid_points(spec: ModelSpec, grid: CheckGrid) -> np.ndarray:
    return np.linspace(-grid.half_width, grid.half_width, grid.n_points) / spec.potential.beta


def _check_potential(spec: ModelSpec, grid: CheckGrid, messages: List[str]) -> Dict[str, bool]:
    pot = spec.potential
    beta = pot.beta
    y = _grid_points(spec, grid)
    up = pot.uprime(y)

    negative = up[y <= 0]
    cond_a = bool(np.all(up >= 0) and np.all(np.diff(negative) <= 0))

    far_right = float(pot.uprime(grid.half_width / beta))
    far_left = float(pot.uprime(-grid.half_width / beta))
    cond_b = far_right < VANISHING_THRESHOLD and far_left > DIVERGING_THRESHOLD

    # U'(2y)/U'(y) must keep growing as y -> -infinity
    ks = np.arange(1, int(grid.half_width) + 1, dtype=float)
    ys = -ks / beta
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = np.asarray(pot.uprime(2.0 * ys)) / np.asarray(pot.uprime(ys))
    cond_c = bool(np.all(np.isfinite(ratio)) and np.all(np.diff(ratio) > 0)
                  and ratio[-1] > DIVERGING_THRESHOLD)

    if not cond_a:
        messages.append("Potential condition 3a fails: U' is negative or not decreasing on y < 0")
    if not cond_b:
        messages.append(
            f"Potential condition 3b fails: U'({grid.half_width:g}/beta) = {far_right:.3g}, "
            f"U'(-{grid.half_width:g}/beta) = {far_left:.3g}"
        )
    if not cond_c:
        messages.append("Potential condition 3c fails: U'(2y)/U'(y) does not diverge")
    if pot.family is PotentialFamily.ZERO:
        messages.append("Zero potential is a test mode and never satisfies the assumptions")
    return {"3a": cond_a, "3b": bool(cond_b), "3c": cond_c}


def _khasminskii_constant(spec: ModelSpec, grid: CheckGrid) -> float:
    rng = np.random.default_rng(grid.seed)
    directions = rng.standard_normal((grid.n_directions, spec.d))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = np.linspace(0.0, grid.half_width / spec.potential.beta, 41)
    x = (radii[:, None, None] * directions[None, :, :]).reshape(-1, spec.d)
    growth = np.sum(x * spec.drift(x), axis=1) / (1.0 + np.sum(x * x, axis=1))
    return float(np.max(growth))


def _lipschitz_constant(spec: ModelSpec, grid: CheckGrid) -> float:
    y = _grid_points(spec, grid)
    up = np.asarray(spec.potential.uprime(y))
    return float(np.max(np.abs(np.diff(up)) / np.diff(y)))
