"""
Total-variation decay between two ensembles and its exponential rate.

The fitted exponent is an empirical surrogate for the convergence rate; it is
not the constant of any ergodicity theorem.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import stats

from ..constants import (
    FIT_MIN_POINTS,
    FIT_TV_HIGH,
    FIT_TV_LOW,
    LOW_R2_THRESHOLD,
    MAX_HISTOGRAM_BINS,
)
from ..core.codec import format_shortest
from ..core.model import ModelSpec
from ..core.particles import ParticleConfig
from ..errors import ConfigurationError, FitError
from ..sim.ensemble import Keep, run_ensemble
from ..sim.integrators import Scheme, step_count
from ..sim.rng import derive_seed
from .distances import empirical_histogram, marginal_tv, pooled_edges, tv_distance, tv_noise_floor

logger = logging.getLogger(__name__)


@dataclass
class DecayFit:
    """
    Least-squares fit of log TV against t.

    Attributes:
        times: All grid times
        tv: TV estimate at each time
        delta: Negated slope of log tv over the window
        intercept: Intercept of the fit
        r2: Coefficient of determination in [0, 1]
        window: (t_lo, t_hi) used
        n_points: Points that entered the fit
    """
    times: np.ndarray
    tv: np.ndarray
    delta: float
    intercept: float
    r2: float
    window: Tuple[float, float]
    n_points: int

    @property
    def low_r2(self) -> bool:
        return self.r2 < LOW_R2_THRESHOLD

    def to_dict(self) -> Dict[str, Any]:
        return {
            "delta": self.delta,
            "intercept": self.intercept,
            "r2": self.r2,
            "window": list(self.window),
            "n_points": self.n_points,
            "low_r2": self.low_r2,
        }


def fit_decay_exponent(
    times: Sequence[float],
    tv_values: Sequence[float],
    window: Optional[Tuple[float, float]] = None,
) -> DecayFit:
    """
    Fit tv(t) ~ exp(intercept - delta t) on the window.

    Only points with 1e-3 < tv < 0.5 are used, which drops both the transient and
    the estimator noise floor.

    Raises:
        FitError: If fewer than 4 usable points remain
    """
    times = np.asarray(times, dtype=float)
    tv = np.asarray(tv_values, dtype=float)
    if times.shape != tv.shape:
        raise ConfigurationError("times and tv_values must have the same length")
    if window is None:
        window = (float(times.min()), float(times.max())) if times.size else (0.0, 0.0)
    lo, hi = window

    usable = (times >= lo) & (times <= hi) & (tv > FIT_TV_LOW) & (tv < FIT_TV_HIGH)
    n_points = int(np.sum(usable))
    if n_points < FIT_MIN_POINTS:
        raise FitError(f"Need at least {FIT_MIN_POINTS} points with {FIT_TV_LOW} < tv < "
                       f"{FIT_TV_HIGH} inside {window}, found {n_points}")

    fit = stats.linregress(times[usable], np.log(tv[usable]))
    r2 = float(fit.rvalue) ** 2
    if not math.isfinite(r2):
        r2 = 0.0
    result = DecayFit(times, tv, 0.0 - float(fit.slope), float(fit.intercept),
                      min(1.0, max(0.0, r2)), (float(lo), float(hi)), n_points)
    if result.low_r2:
        logger.warning(f"Decay fit has low r2 = {r2:.3g} (delta = {result.delta:.4g})")
    return result


def auto_fit_window(times: np.ndarray, tv: np.ndarray, noise_floor: float,
                    factor: float = 3.0) -> Tuple[float, float]:
    """(t_0, first t where tv drops below factor * noise_floor), or the whole grid."""
    times = np.asarray(times, dtype=float)
    below = np.flatnonzero(np.asarray(tv) < factor * noise_floor)
    t_hi = float(times[below[0]]) if below.size else float(times[-1])
    return float(times[0]), t_hi


@dataclass
class MixingCurve:
    """TV between two ensembles on a time grid."""
    times: np.ndarray
    tv: np.ndarray
    n_paths: int
    noise_floor: float
    observable: str
    seeds: Tuple[int, int]

    def fit(self, window: Optional[Tuple[float, float]] = None) -> DecayFit:
        """Decay fit on the given window, or up to where TV reaches three noise floors."""
        if window is None:
            window = auto_fit_window(self.times, self.tv, self.noise_floor)
        return fit_decay_exponent(self.times, self.tv, window)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.times, "tv": self.tv,
                             "n_paths": np.full(self.times.shape, self.n_paths)})

    def to_csv(self, path: Any) -> None:
        self.to_frame().to_csv(path, index=False, float_format=format_shortest, lineterminator="\n")


def mixing_curve(
    target: Union[ModelSpec, ParticleConfig],
    x0_pair: Tuple[Any, Any],
    times: Sequence[float],
    n_paths: int,
    seed: int,
    dt: float,
    seeds: Optional[Tuple[int, int]] = None,
    scheme: Optional[Union[str, Scheme]] = None,
    observe_gaps: bool = False,
    max_bins: int = MAX_HISTOGRAM_BINS,
    workers: int = 1,
    progress: bool = False,
) -> MixingCurve:
    """
    Histogram TV between ensembles started from two initial laws.

    Edges are Freedman-Diaconis edges of the pooled samples at the last grid time and
    stay fixed over the grid. For d <= 2 the joint histogram is used, otherwise the
    largest coordinate-wise TV.

    Args:
        target: Stable model or particle config
        x0_pair: Two initial laws, each a point (length d) or per-path states (n_paths x d)
        times: Grid times, multiples of dt
        n_paths: Paths per ensemble
        seed: Seed of the first ensemble; the second uses an independent derived seed
        dt: Step size
        seeds: Explicit (seed_a, seed_b), overriding seed
        scheme: Discretization for GRBM and soft particles
        observe_gaps: Compare gap vectors instead of positions (particle systems)
        max_bins: Bin cap per dimension
        workers: Worker processes
        progress: Show progress bars
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0 or np.any(np.diff(times) <= 0) or times[0] < 0:
        raise ConfigurationError("Time grid must be non-empty, increasing and non-negative")
    steps = [step_count(dt, float(t)) for t in times]
    T = float(times[-1])
    seed_a, seed_b = seeds if seeds is not None else (seed, derive_seed(seed, 1))

    runs = [
        run_ensemble(target, n_paths, dt, T, s, x0, Keep.at_steps(steps), scheme,
                     workers=workers, progress=progress)
        for s, x0 in ((seed_a, x0_pair[0]), (seed_b, x0_pair[1]))
    ]

    def observe(ens, step: int) -> np.ndarray:
        x = ens.states_at_step(step)
        return np.diff(x, axis=1) if observe_gaps else x

    final_a, final_b = observe(runs[0], steps[-1]), observe(runs[1], steps[-1])
    edges = pooled_edges([final_a, final_b], max_bins)
    joint = final_a.shape[1] <= 2

    tv: List[float] = []
    for step in steps:
        a, b = observe(runs[0], step), observe(runs[1], step)
        if joint:
            tv.append(tv_distance(empirical_histogram(a, edges), empirical_histogram(b, edges)))
        else:
            tv.append(marginal_tv(a, b, edges))

    if joint:
        pooled = empirical_histogram(np.concatenate([final_a, final_b]), edges)
        floor = tv_noise_floor(pooled.mass, n_paths, n_paths)
    else:
        floor = max(
            tv_noise_floor(empirical_histogram(np.concatenate([final_a[:, j], final_b[:, j]]),
                                               [edges[j]]).mass, n_paths, n_paths)
            for j in range(final_a.shape[1])
        )
    observable = "joint_tv" if joint else "marginal_tv"
    logger.info(f"Mixing curve over {times.size} times, final tv = {tv[-1]:.4g}, "
                f"noise floor = {floor:.4g} ({observable})")
    return MixingCurve(times, np.array(tv), n_paths, floor, observable, (seed_a, seed_b))
