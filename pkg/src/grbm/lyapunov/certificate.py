"""
Sampled drift certificate for L V <= -k V + b 1_{B_r}.

The certificate is empirical, never rigorous: k is read off as minus the
largest sampled LV/V on the shell r <= |x| <= shell_outer, and b as the largest
sampled LV + kV inside the ball B_r. Samples come from the counter-based
stream, so the report does not depend on how the sample set is split across
workers.
"""

import logging
import math
import multiprocessing
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..constants import (
    DEFAULT_EPS,
    DEFAULT_SHELL_SAMPLES,
    ENSEMBLE_CHUNK_SIZE,
    RADIUS_SEARCH_LIMIT,
    RADIUS_SEARCH_START,
    SHELL_OUTER_FACTOR,
)
from ..core.codec import format_shortest
from ..core.model import ModelSpec
from ..core.rates import drift_rate_bound
from ..core.validation import require_stable
from ..errors import ConfigurationError, PreconditionError
from ..sim.noise import row_norms
from ..sim.rng import standard_normals, uniform_block
from .bump import BUMP
from .generator import generator_ratio

logger = logging.getLogger(__name__)

# Stream steps used for the two sample families
_DIRECTION_STEP = 0
_RADIUS_STEP = 1


@dataclass
class DriftReport:
    """
    Outcome of one certificate attempt.

    Attributes:
        lambda_: Exponent of V
        k: Contraction rate found, -max LV/V on the shell
        k_target: Rate required for acceptance, drift_rate_bound(spec, eps)
        b: Offset max(0, max LV + kV) inside B_r (inf when V overflows)
        r: Ball radius
        shell_outer: Outer shell radius
        n_samples: Samples on the shell (the same number is drawn inside B_r)
        worst_margin: max over the shell of LV/V + k_target
        violation_count: Shell samples with LV/V + k_target > 0
        eps: Slack subtracted from min mu_i^2 in k_target
        seed: Sampling seed
    """
    lambda_: float
    k: float
    k_target: float
    b: float
    r: float
    shell_outer: float
    n_samples: int
    worst_margin: float
    violation_count: int
    eps: float
    seed: int
    radii: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))
    ratios: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))

    @property
    def accepted(self) -> bool:
        return self.k > 0 and self.worst_margin <= 0 and self.violation_count == 0

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready summary; b is null when it overflowed."""
        return {
            "lambda": self.lambda_,
            "k": self.k,
            "k_target": self.k_target,
            "b": self.b if math.isfinite(self.b) else None,
            "r": self.r,
            "shell_outer": self.shell_outer,
            "n_samples": self.n_samples,
            "worst_margin": self.worst_margin,
            "violation_count": self.violation_count,
            "eps": self.eps,
            "seed": self.seed,
            "accepted": self.accepted,
            "rigorous": False,
        }

    def samples_frame(self) -> pd.DataFrame:
        """Shell samples as a table with columns idx, radius, lv_over_v."""
        return pd.DataFrame({
            "idx": np.arange(self.radii.shape[0]),
            "radius": self.radii,
            "lv_over_v": self.ratios,
        })

    def samples_to_csv(self, path: Any) -> None:
        self.samples_frame().to_csv(path, index=False, float_format=format_shortest,
                                    lineterminator="\n")


def sample_annulus(seed: int, rows: np.ndarray, d: int, r_lo: float, r_hi: float) -> np.ndarray:
    """
    Points with a uniform direction on the sphere and a uniform radius in [r_lo, r_hi].

    Each row index always maps to the same point.
    """
    g = standard_normals(seed, rows, _DIRECTION_STEP, d)
    directions = g / row_norms(g)[:, None]
    u = uniform_block(seed, rows, _RADIUS_STEP, 1)[:, 0]
    radii = r_lo + (r_hi - r_lo) * u
    return directions * radii[:, None]


def _chunk_ratios(task: Tuple) -> Tuple[np.ndarray, np.ndarray]:
    spec, lam, seed, start, stop, r_lo, r_hi = task
    rows = np.arange(start, stop, dtype=np.uint64)
    x = sample_annulus(seed, rows, spec.d, r_lo, r_hi)
    return row_norms(x), np.atleast_1d(generator_ratio(spec, lam, x))


def _sampled_ratios(
    spec: ModelSpec,
    lam: float,
    seed: int,
    first_row: int,
    n: int,
    r_lo: float,
    r_hi: float,
    workers: int,
) -> Tuple[np.ndarray, np.ndarray]:
    tasks = [
        (spec, lam, seed, start, min(start + ENSEMBLE_CHUNK_SIZE, first_row + n), r_lo, r_hi)
        for start in range(first_row, first_row + n, ENSEMBLE_CHUNK_SIZE)
    ]
    if workers > 1 and len(tasks) > 1:
        with multiprocessing.Pool(processes=min(workers, len(tasks))) as pool:
            results = pool.map(_chunk_ratios, tasks)
    else:
        results = [_chunk_ratios(task) for task in tasks]
    radii = np.concatenate([res[0] for res in results])
    ratios = np.concatenate([res[1] for res in results])
    return radii, ratios


def verify_drift(
    spec: ModelSpec,
    lam: float,
    r: float,
    shell_outer: float,
    n: int = DEFAULT_SHELL_SAMPLES,
    seed: int = 0,
    eps: float = DEFAULT_EPS,
    workers: int = 1,
) -> DriftReport:
    """
    Sample the drift condition for V = exp(lambda phi(|x|)).

    Args:
        spec: Stable model with positive definite Gamma
        lam: Exponent lambda > 0
        r: Radius of the exceptional ball
        shell_outer: Outer radius of the sampled shell
        n: Samples on the shell and, separately, inside B_r
        seed: Sampling seed
        eps: Slack of the acceptance threshold
        workers: Worker processes; the report does not depend on this

    Returns:
        DriftReport; a rejected certificate is a result, not an error

    Raises:
        StabilityError: If mu is not componentwise negative
    """
    require_stable(spec)
    if not lam > 0:
        raise PreconditionError(f"lambda must be positive, got {lam}")
    if not 0 < r < shell_outer:
        raise ConfigurationError(
            f"Need 0 < r < shell_outer, got r = {r}, shell_outer = {shell_outer}")
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n}")

    k_target = drift_rate_bound(spec, eps)

    radii, ratios = _sampled_ratios(spec, lam, seed, 0, n, r, shell_outer, workers)
    worst = float(np.max(ratios))
    k = -worst

    # Inside the ball: rows n .. 2n - 1 of the same stream
    inner_radii, inner_ratios = _sampled_ratios(spec, lam, seed, n, n, 0.0, r, workers)
    with np.errstate(over='ignore', invalid='ignore'):
        v = np.exp(lam * BUMP.phi(inner_radii))
        offsets = (inner_ratios + k) * v
    offsets = np.where(np.isnan(offsets), np.inf, offsets)
    b = max(0.0, float(np.max(offsets)))

    report = DriftReport(
        lambda_=float(lam),
        k=k,
        k_target=k_target,
        b=b,
        r=float(r),
        shell_outer=float(shell_outer),
        n_samples=int(n),
        worst_margin=worst + k_target,
        violation_count=int(np.sum(ratios + k_target > 0)),
        eps=float(eps),
        seed=seed,
        radii=radii,
        ratios=ratios,
    )
    logger.info(f"Drift certificate at r = {r:g}: k = {k:.6g}, target = {k_target:.6g}, "
                f"accepted = {report.accepted}")
    return report


def search_drift_radius(
    spec: ModelSpec,
    lam: float,
    n: int = DEFAULT_SHELL_SAMPLES,
    seed: int = 0,
    eps: float = DEFAULT_EPS,
    r_start: float = RADIUS_SEARCH_START,
    r_limit: float = RADIUS_SEARCH_LIMIT,
    workers: int = 1,
) -> Tuple[DriftReport, List[DriftReport]]:
    """
    Double r from r_start until the certificate is accepted or r exceeds r_limit.

    The shell is always [r, 10 r].

    Returns:
        (last report, all reports in order); the last report is rejected if the search failed
    """
    history: List[DriftReport] = []
    r = float(r_start)
    report: Optional[DriftReport] = None
    while r <= r_limit:
        report = verify_drift(spec, lam, r, SHELL_OUTER_FACTOR * r, n, seed, eps, workers)
        history.append(report)
        if report.accepted:
            break
        logger.info(f"Certificate rejected at r = {r:g}, doubling")
        r *= 2.0
    if report is None:
        raise ConfigurationError(f"r_start = {r_start} already exceeds the limit {r_limit}")
    return report, history
