"""
Product-form stationary densities.

Under the generalized skew-symmetry condition r_ij + r_ji = 2 Gamma_ij the
GRBM has the unnormalized stationary density

    p(x) = exp(2 [sum_i U(x_i) + w . x]),   w = (2 Gamma - R)^{-1} mu,

which factorizes over coordinates, so each marginal is proportional to
exp(2 U(x_i) + 2 w_i x_i). Normalization is by composite Gauss-Legendre
quadrature in d <= 2.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..constants import (
    BOUNDARY_MASS_RATIO,
    DENSITY_SKEW_TOL,
    QUADRATURE_MAX_NODES,
    QUADRATURE_PANEL_ORDER,
    QUADRATURE_RTOL,
)
from ..core.model import ModelSpec, check_skew_symmetry
from ..errors import ConfigurationError, DomainTooSmallError, NumericError, PreconditionError

logger = logging.getLogger(__name__)

_LOG_BOUNDARY = math.log(BOUNDARY_MASS_RATIO)

LogDensity = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lower_i, upper_i]."""
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ConfigurationError("Box bounds must have the same length")
        if any(not lo < hi for lo, hi in zip(self.lower, self.upper)):
            raise ConfigurationError(f"Box needs lower < upper, got {self.lower}, {self.upper}")

    @property
    def d(self) -> int:
        return len(self.lower)

    @classmethod
    def interval(cls, lo: float, hi: float) -> "Box":
        return cls((float(lo),), (float(hi),))


@dataclass
class DensitySpec:
    """
    Unnormalized density with its normalization once computed.

    Attributes:
        model_digest: Digest of the model the density belongs to ("" for ad hoc densities)
        d: Dimension
        log_density: Batch evaluator, (n, d) -> (n,)
        support: Bounded support, or None for the whole space
        Z: Normalization constant, set by normalize_density
    """
    model_digest: str
    d: int
    log_density: LogDensity
    support: Optional[Box] = None
    Z: Optional[float] = None

    def pdf(self, x: np.ndarray) -> np.ndarray:
        if self.Z is None:
            raise PreconditionError("Density is not normalized yet")
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.exp(self.log_density(x)) / self.Z


def stationary_weights(spec: ModelSpec) -> np.ndarray:
    """
    w = (2 Gamma - R)^{-1} mu.

    The formula is stated for the scaling Gamma_ii = r_ii, which is checked too.

    Raises:
        PreconditionError: If skew-symmetry fails (the formula is inapplicable)
        NumericError: If 2 Gamma - R is singular
    """
    if not check_skew_symmetry(spec.gamma, spec.refl, DENSITY_SKEW_TOL):
        raise PreconditionError(
            "Generalized skew-symmetry fails; the product-form density formula is inapplicable"
        )
    if np.any(np.abs(np.diag(spec.gamma) - np.diag(spec.refl)) > DENSITY_SKEW_TOL):
        raise PreconditionError(
            "Product-form density needs Gamma_ii = r_ii; rescale the model first"
        )
    system = 2.0 * spec.gamma - spec.refl
    try:
        w = np.linalg.solve(system, spec.mu)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"2 Gamma - R is singular: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise NumericError("2 Gamma - R is numerically singular")
    return w


def product_log_density(spec: ModelSpec, x: np.ndarray) -> np.ndarray:
    """
    log p(x) = 2 [sum_i U(x_i) + w . x], unnormalized; scalar for one state, (n,) for a batch.
    """
    w = stationary_weights(spec)
    x = np.asarray(x, dtype=float)
    u = np.asarray(spec.potential.value(x), dtype=float)
    return 2.0 * (np.sum(u, axis=-1) + np.sum(w * x, axis=-1))


def density_spec(spec: ModelSpec) -> DensitySpec:
    """The product-form stationary density of a skew-symmetric model."""
    w = stationary_weights(spec)
    potential = spec.potential

    def log_density(x: np.ndarray) -> np.ndarray:
        return 2.0 * (np.sum(potential.value(x), axis=-1) + x @ w)

    return DensitySpec(spec.digest(), spec.d, log_density)


def marginal_density_spec(spec: ModelSpec, i: int) -> DensitySpec:
    """Coordinate-i marginal, proportional to exp(2 U(y) + 2 w_i y)."""
    w_i = float(stationary_weights(spec)[i])
    potential = spec.potential

    def log_density(x: np.ndarray) -> np.ndarray:
        y = x[:, 0]
        return 2.0 * (potential.value(y) + w_i * y)

    return DensitySpec(spec.digest(), 1, log_density)


# ==============================================================================
# Quadrature
# ==============================================================================

def _panel_rule(lo: float, hi: float, n_nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [lo, hi] with about n_nodes points."""
    order = QUADRATURE_PANEL_ORDER
    n_panels = max(1, math.ceil(n_nodes / order))
    ref_x, ref_w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * ref_x[None, :]).ravel()
    weights = (half[:, None] * ref_w[None, :]).ravel()
    return nodes, weights


def _tensor_rule(domain: Box, n_nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    rules = [_panel_rule(lo, hi, n_nodes) for lo, hi in zip(domain.lower, domain.upper)]
    if domain.d == 1:
        nodes, weights = rules[0]
        return nodes[:, None], weights
    (x0, w0), (x1, w1) = rules
    g0, g1 = np.meshgrid(x0, x1, indexing='ij')
    nodes = np.column_stack([g0.ravel(), g1.ravel()])
    weights = np.outer(w0, w1).ravel()
    return nodes, weights


def _log_integral(dspec: DensitySpec, domain: Box, n_nodes: int) -> Tuple[float, float]:
    """(log Z, max log density over the nodes), using a max shift against overflow."""
    nodes, weights = _tensor_rule(domain, n_nodes)
    with np.errstate(over='ignore', invalid='ignore'):
        logf = np.asarray(dspec.log_density(nodes), dtype=float)
    logf = np.where(np.isnan(logf), -np.inf, logf)
    peak = float(np.max(logf))
    if not math.isfinite(peak):
        raise NumericError("Density vanishes or overflows on the whole quadrature domain")
    return peak + math.log(float(np.sum(weights * np.exp(logf - peak)))), peak


def _boundary_points(dspec: DensitySpec, domain: Box, n_edge: int = 257) -> np.ndarray:
    """Points on the faces of the domain that lie strictly inside the support."""
    faces: List[np.ndarray] = []
    for axis in range(domain.d):
        for side, value in ((0, domain.lower[axis]), (1, domain.upper[axis])):
            if dspec.support is not None:
                bound = (dspec.support.lower if side == 0 else dspec.support.upper)[axis]
                if (value <= bound) if side == 0 else (value >= bound):
                    continue
            if domain.d == 1:
                faces.append(np.array([[value]]))
                continue
            other = 1 - axis
            t = np.linspace(domain.lower[other], domain.upper[other], n_edge)
            face = np.empty((n_edge, 2))
            face[:, axis] = value
            face[:, other] = t
            faces.append(face)
    return np.concatenate(faces, axis=0) if faces else np.empty((0, domain.d))


def normalize_density(dspec: DensitySpec, domain: Box, n_quad: int = 2000,
                      max_nodes: int = QUADRATURE_MAX_NODES) -> float:
    """
    Normalization constant Z of exp(log_density) over the domain.

    Uses composite Gauss-Legendre with n_quad nodes per dimension and compares
    against 2 n_quad nodes. While the two differ by more than 1e-8 relative the
    node count is doubled again; the finest value is returned and stored on dspec.

    Raises:
        PreconditionError: If d > 2 or the domain dimension does not match
        DomainTooSmallError: If the density on the domain boundary exceeds 1e-12 of its peak
        NumericError: If the rule has not converged before the grid exceeds max_nodes
    """
    if dspec.d > 2:
        raise PreconditionError(f"Quadrature supports d <= 2, got d = {dspec.d}")
    if domain.d != dspec.d:
        raise ConfigurationError(f"Domain has dimension {domain.d}, density has {dspec.d}")
    if n_quad < 1:
        raise ConfigurationError(f"n_quad must be >= 1, got {n_quad}")

    n = n_quad
    log_z, peak = _log_integral(dspec, domain, n)
    log_z_fine, peak_fine = _log_integral(dspec, domain, 2 * n)
    peak = max(peak, peak_fine)

    boundary = _boundary_points(dspec, domain)
    if boundary.shape[0]:
        with np.errstate(over='ignore', invalid='ignore'):
            edge = float(np.nanmax(dspec.log_density(boundary)))
        if edge - peak > _LOG_BOUNDARY:
            raise DomainTooSmallError(
                f"Boundary density is {math.exp(min(edge - peak, 0.0)):.3g} of the peak; "
                f"enlarge the domain (need < {BOUNDARY_MASS_RATIO:g})"
            )

    rel = abs(math.expm1(log_z - log_z_fine))
    while rel > QUADRATURE_RTOL:
        n *= 2
        if (2 * n) ** dspec.d > max_nodes:
            raise NumericError(
                f"Quadrature not converged: relative change {rel:.3g} > {QUADRATURE_RTOL:g} "
                f"at {n} nodes per dimension"
            )
        logger.info(f"Relative change {rel:.3g}, refining to {2 * n} nodes per dimension")
        log_z = log_z_fine
        log_z_fine, _ = _log_integral(dspec, domain, 2 * n)
        rel = abs(math.expm1(log_z - log_z_fine))

    Z = math.exp(log_z_fine)
    dspec.Z = Z
    logger.debug(f"Normalized density on {domain}: Z = {Z:.17g}, Richardson gap {rel:.3g}")
    return Z


def auto_domain_1d(log_density: LogDensity, center: float, scale: float = 1.0,
                   max_doublings: int = 40) -> Box:
    """
    Interval around center whose ends carry less than 1e-12 of the density at center.

    Each side is doubled independently until its end passes the boundary check with
    a margin of e^-2.
    """
    peak = float(log_density(np.array([[center]]))[0])
    ends = []
    for sign in (-1.0, 1.0):
        width = scale
        for _ in range(max_doublings):
            with np.errstate(over='ignore', invalid='ignore'):
                value = float(log_density(np.array([[center + sign * width]]))[0])
            if math.isnan(value) or value - peak < _LOG_BOUNDARY - 2.0:
                break
            width *= 2.0
        else:
            raise DomainTooSmallError("Density tail does not decay; it may not be integrable")
        ends.append(center + sign * width)
    return Box.interval(ends[0], ends[1])


def marginal_mode(spec: ModelSpec, i: int) -> float:
    """Mode of marginal i for the exponential potential: e^{-beta y} = -w_i."""
    w_i = float(stationary_weights(spec)[i])
    if w_i >= 0:
        raise PreconditionError(f"Marginal {i + 1} is not integrable (w_i = {w_i:.6g} >= 0)")
    if spec.potential.uprime(0.0) == 0.0:
        raise PreconditionError("The zero potential has no normalizable stationary density")
    return -math.log(-w_i) / spec.potential.beta


@dataclass
class MarginalCDF:
    """
    Analytic CDF of one stationary marginal, tabulated by panel quadrature.

    Between panel edges the CDF is interpolated linearly.
    """
    edges: np.ndarray
    values: np.ndarray
    Z: float

    def __call__(self, y: np.ndarray) -> np.ndarray:
        return np.interp(y, self.edges, self.values, left=0.0, right=1.0)


def marginal_cdf(spec: ModelSpec, i: int, n_panels: int = 4096) -> MarginalCDF:
    """
    CDF of coordinate i under the product-form stationary law.

    Raises:
        PreconditionError: If skew-symmetry fails or the marginal is not integrable
    """
    dspec = marginal_density_spec(spec, i)
    mode = marginal_mode(spec, i)
    domain = auto_domain_1d(dspec.log_density, mode, 1.0 / spec.potential.beta)
    Z = normalize_density(dspec, domain)

    lo, hi = domain.lower[0], domain.upper[0]
    edges = np.linspace(lo, hi, n_panels + 1)
    ref_x, ref_w = np.polynomial.legendre.leggauss(QUADRATURE_PANEL_ORDER)
    half = 0.5 * (edges[1] - edges[0])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half * ref_x[None, :]).reshape(-1, 1)
    pdf = np.exp(dspec.log_density(nodes)).reshape(n_panels, -1) / Z
    panel_mass = half * (pdf @ ref_w)
    values = np.concatenate([[0.0], np.cumsum(panel_mass)])
    values = np.clip(values / values[-1], 0.0, 1.0)
    return MarginalCDF(edges, values, Z)


def product_domain(spec: ModelSpec) -> Box:
    """Tensor box built from the auto domains of every marginal."""
    lows, highs = [], []
    for i in range(spec.d):
        dom = auto_domain_1d(marginal_density_spec(spec, i).log_density, marginal_mode(spec, i),
                             1.0 / spec.potential.beta)
        lows.append(dom.lower[0])
        highs.append(dom.upper[0])
    return Box(tuple(lows), tuple(highs))


def marginal_normalizers(spec: ModelSpec) -> Sequence[float]:
    """Z_i of every marginal; their product is the joint Z."""
    out = []
    for i in range(spec.d):
        dspec = marginal_density_spec(spec, i)
        domain = auto_domain_1d(dspec.log_density, marginal_mode(spec, i),
                                1.0 / spec.potential.beta)
        out.append(normalize_density(dspec, domain))
    return out
