"""
Experiment runners behind the CLI subcommands.

Each runner takes a parsed ExperimentConfig, writes its tables and charts
through an ArtifactStore and returns an ExperimentResult. Whether the run
passed decides the exit code; the summary becomes report.json.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..core.model import ModelSpec
from ..core.particles import ParticleConfig, Reflection
from ..core.potential import PotentialSpec
from ..core.rates import pattern_drifts, rate_constants, rate_scaling_table, theorem_lambda
from ..core.validation import CheckGrid, validate_model
from ..errors import ConfigurationError, FitError, PreconditionError, StabilityError
from ..lyapunov.certificate import search_drift_radius, verify_drift
from ..reports.svg import Series, line_chart
from ..sim.ensemble import Keep, run_ensemble
from ..sim.integrators import (
    Scheme,
    simulate_grbm,
    simulate_hard_particles,
    simulate_soft_particles,
)
from ..sim.rng import derive_seed
from ..stationary.decay import DecayFit, MixingCurve, mixing_curve
from ..stationary.density import (
    density_spec,
    marginal_cdf,
    marginal_density_spec,
    normalize_density,
    product_domain,
)
from ..stationary.distances import freedman_diaconis_edges, ks_test_1d
from ..stationary.penalty import penalty_sweep
from ..stationary.tails import tail_functional
from ..storage.artifact_store import ArtifactStore
from .config import ExperimentConfig

logger = logging.getLogger(__name__)

# Coordinates drawn in trajectory and density charts
_MAX_PLOTTED = 6


@dataclass
class ExperimentResult:
    """Outcome of one experiment run."""
    kind: str
    passed: bool
    summary: Dict[str, Any]
    messages: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "passed": self.passed, "summary": self.summary,
                "messages": self.messages}


@dataclass
class RunContext:
    """Execution settings that never change the results."""
    store: ArtifactStore
    workers: int = 1
    progress: bool = False


def _default_start(target: Any) -> np.ndarray:
    """Origin for a GRBM, unit spacing for particles."""
    if isinstance(target, ParticleConfig):
        return np.arange(target.d, dtype=float)
    return np.zeros(target.d)


def _time_grid(T: float, dt: float, n_times: int) -> np.ndarray:
    """n_times + 1 points from 0 to T, each on the dt grid."""
    if n_times < 1:
        raise ConfigurationError(f"n_times must be >= 1, got {n_times}")
    total = int(round(T / dt))
    steps = np.unique(np.round(np.linspace(0, total, n_times + 1)).astype(np.int64))
    return steps * dt


# ==============================================================================
# validate
# ==============================================================================

def run_validate(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    analysis = config.analysis
    grid = CheckGrid(
        n_points=int(analysis["grid_points"]),
        half_width=float(analysis["half_width"]),
        n_directions=int(analysis["n_directions"]),
        seed=config.run.seed,
    )
    if config.particles is not None:
        spec = config.particles.gap_model()
        report = validate_model(spec, grid)
        summary = report.to_dict()
        summary["rate_constants"] = rate_constants(config.particles).to_dict()
    else:
        spec = config.require_model()
        report = validate_model(spec, grid)
        summary = report.to_dict()
    summary["model_digest"] = spec.digest()
    return ExperimentResult(config.kind, report.ok, summary, list(report.messages))


# ==============================================================================
# simulate
# ==============================================================================

def run_simulate(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    target = config.target
    run = config.run
    analysis = config.analysis
    x0 = analysis["x0"] if analysis["x0"] is not None else _default_start(target)
    noise_scale = float(analysis["noise_scale"])
    scheme = run.scheme or Scheme.TAMED_EULER

    if run.n_paths == 1:
        if isinstance(target, ModelSpec):
            traj = simulate_grbm(target, x0, run.dt, run.T, run.seed, scheme, noise_scale)
        elif target.reflection is Reflection.HARD:
            traj = simulate_hard_particles(target.d, target.mu, x0, run.dt, run.T, run.seed,
                                           noise_scale)
        else:
            traj = simulate_soft_particles(target.d, target.mu, target.potential, x0, run.dt,
                                           run.T, run.seed, scheme, noise_scale)
        ctx.store.write_csv("trajectory.csv", traj.to_frame())
        times = traj.times
        series = [Series(f"x{i + 1}", times, traj.states[:, i])
                  for i in range(min(traj.d, _MAX_PLOTTED))]
        ctx.store.write_text("trajectory.svg", line_chart(
            series, title="Simulated path", x_label="t", y_label="state"))
        summary = {
            "n_paths": 1,
            "n_steps": traj.n_steps,
            "scheme": traj.scheme.value,
            "terminal_state": traj.states[-1].tolist(),
        }
        return ExperimentResult(config.kind, True, summary)

    every = int(analysis["keep_every"])
    keep = Keep.thinned(every) if every > 0 else Keep.terminal()
    ens = run_ensemble(target, run.n_paths, run.dt, run.T, run.seed, x0, keep, run.scheme,
                       noise_scale, ctx.workers, ctx.progress)
    ctx.store.write_csv("terminal_states.csv", ens.to_frame())
    if ens.paths is not None:
        mean_path = ens.paths.mean(axis=0)
        series = [Series(f"mean x{i + 1}", ens.kept_times, mean_path[:, i])
                  for i in range(min(ens.terminal_states.shape[1], _MAX_PLOTTED))]
        ctx.store.write_text("ensemble_mean.svg", line_chart(
            series, title="Ensemble mean", x_label="t", y_label="state"))
    summary = {
        "n_paths": ens.n_paths,
        "scheme": ens.scheme.value,
        "model_digest": ens.model_digest,
        "terminal_mean": ens.terminal_states.mean(axis=0).tolist(),
        "terminal_std": ens.terminal_states.std(axis=0, ddof=1).tolist(),
    }
    return ExperimentResult(config.kind, True, summary)


# ==============================================================================
# drift-check
# ==============================================================================

def run_drift_check(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    spec = config.require_model()
    analysis = config.analysis
    lam = float(analysis["lambda"]) if analysis["lambda"] is not None else theorem_lambda(spec)
    n = int(analysis["n_samples"])
    eps = float(analysis["eps"])
    seed = config.run.seed

    if analysis["r"] is not None:
        r = float(analysis["r"])
        outer = float(analysis["shell_outer"]) if analysis["shell_outer"] is not None else 10.0 * r
        report = verify_drift(spec, lam, r, outer, n, seed, eps, ctx.workers)
        history = [report]
    else:
        report, history = search_drift_radius(
            spec, lam, n, seed, eps, float(analysis["r_start"]), float(analysis["r_limit"]),
            ctx.workers,
        )

    ctx.store.write_csv("drift_samples.csv", report.samples_frame())
    summary = report.to_dict()
    summary["model_digest"] = spec.digest()
    summary["search"] = [{"r": h.r, "k": h.k, "accepted": h.accepted} for h in history]
    messages = [] if report.accepted else [
        f"Certificate rejected: k = {report.k:.6g} < target {report.k_target:.6g} "
        f"({report.violation_count} violating samples)"
    ]
    return ExperimentResult(config.kind, report.accepted, summary, messages)


# ==============================================================================
# stationary-check
# ==============================================================================

def _density_chart(samples: np.ndarray, label: str, pdf: Callable[[np.ndarray], np.ndarray]) -> str:
    edges = freedman_diaconis_edges(samples)
    counts, _ = np.histogram(samples, bins=edges, density=True)
    centers = 0.5 * (edges[1:] + edges[:-1])
    grid = np.linspace(edges[0], edges[-1], 201)
    return line_chart(
        [Series("empirical", centers, counts), Series("analytic", grid, pdf(grid))],
        title=f"Stationary marginal {label}", x_label=label, y_label="density",
    )


def _check_grbm_stationary(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    spec = config.require_model()
    run = config.run
    analysis = config.analysis
    x0 = analysis["x0"] if analysis["x0"] is not None else _default_start(spec)
    alpha = float(analysis["alpha"])

    ens = run_ensemble(spec, run.n_paths, run.dt, run.T, run.seed, x0, Keep.terminal(),
                       run.scheme, workers=ctx.workers, progress=ctx.progress)
    ctx.store.write_csv("terminal_states.csv", ens.to_frame())
    samples = ens.terminal_states

    passed = True
    messages: List[str] = []
    ks_results = []
    marginal_Z = []
    for i in range(spec.d):
        cdf = marginal_cdf(spec, i)
        marginal_Z.append(float(cdf.Z))
        ks = ks_test_1d(samples[:, i], cdf, alpha)
        ks_results.append(ks.to_dict())
        if not ks.passed:
            passed = False
            messages.append(f"KS test fails for x{i + 1}: D = {ks.statistic:.4g}, "
                            f"p = {ks.pvalue:.3g} < {alpha}")
        if i < _MAX_PLOTTED:
            log_density = marginal_density_spec(spec, i).log_density
            Z = cdf.Z

            def pdf(y: np.ndarray, log_density=log_density, Z=Z) -> np.ndarray:
                return np.exp(log_density(y[:, None])) / Z

            ctx.store.write_text(f"density_x{i + 1}.svg",
                                 _density_chart(samples[:, i], f"x{i + 1}", pdf))

    summary: Dict[str, Any] = {
        "model_digest": spec.digest(),
        "n_paths": ens.n_paths,
        "T": run.T,
        "ks": ks_results,
        "marginal_Z": marginal_Z,
    }

    if spec.d <= 2:
        joint_Z = normalize_density(density_spec(spec), product_domain(spec))
        product_Z = float(np.prod(marginal_Z))
        rel = abs(joint_Z - product_Z) / product_Z
        summary["joint_Z"] = joint_Z
        summary["joint_Z_relative_error"] = rel
        if rel > float(analysis["z_rtol"]):
            passed = False
            messages.append(f"Joint Z = {joint_Z:.10g} differs from the product of marginals "
                            f"{product_Z:.10g} (relative {rel:.3g})")

    lam = analysis["tail_lambda"]
    lam = float(lam) if lam is not None else theorem_lambda(spec)
    if lam > 0:
        summary["tail"] = tail_functional(samples, lam, theorem_lambda(spec)).to_dict()
    return ExperimentResult(config.kind, passed, summary, messages)


def _check_hard_gap_stationary(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    """Two hard particles: the gap is a reflected BM with variance 2 and Exp(|mu~|) law."""
    particles = config.require_particles()
    if particles.d != 2:
        raise PreconditionError(
            f"The hard-reflection stationary check has a closed form only for d = 2, "
            f"got d = {particles.d}"
        )
    mu_tilde = float(particles.mu_tilde()[0])
    if mu_tilde >= 0:
        raise StabilityError(f"The gap needs mu_2 - mu_1 < 0, got {mu_tilde}")
    run = config.run
    analysis = config.analysis
    z0 = analysis["x0"] if analysis["x0"] is not None else _default_start(particles)

    ens = run_ensemble(particles, run.n_paths, run.dt, run.T, run.seed, z0, Keep.terminal(),
                       workers=ctx.workers, progress=ctx.progress)
    ctx.store.write_csv("terminal_states.csv", ens.to_frame())
    gap = ens.gaps()[:, 0]
    rate = abs(mu_tilde)
    expected = 1.0 / rate
    mean = float(np.mean(gap))
    rel = abs(mean - expected) / expected
    tolerance = float(analysis["mean_tolerance"])
    ks = ks_test_1d(gap, lambda y: 1.0 - np.exp(-rate * np.maximum(y, 0.0)),
                    float(analysis["alpha"]))

    ctx.store.write_text("density_gap.svg", _density_chart(
        gap, "gap", lambda y: np.where(y >= 0, rate * np.exp(-rate * y), 0.0)))
    summary = {
        "particles_digest": particles.digest(),
        "n_paths": ens.n_paths,
        "T": run.T,
        "mean_gap": mean,
        "expected_mean_gap": expected,
        "relative_error": rel,
        "mean_tolerance": tolerance,
        "ks_exponential": ks.to_dict(),
    }
    passed = rel <= tolerance
    messages = [] if passed else [
        f"Mean gap {mean:.4g} is not within {tolerance:.0%} of {expected:.4g}"
    ]
    return ExperimentResult(config.kind, passed, summary, messages)


def run_stationary_check(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    if config.particles is not None:
        if config.particles.reflection is Reflection.HARD:
            return _check_hard_gap_stationary(config, ctx)
        raise PreconditionError(
            "Soft particle gaps have no product-form stationary law; use a 'model' section"
        )
    return _check_grbm_stationary(config, ctx)


# ==============================================================================
# mixing
# ==============================================================================

def _default_pair(target: Any) -> Tuple[np.ndarray, np.ndarray]:
    """Two starting points: -2 and +4 per coordinate, or gaps 0 and 4 for particles."""
    if isinstance(target, ParticleConfig):
        positions = np.arange(target.d, dtype=float)
        return 0.0 * positions, 4.0 * positions
    return np.full(target.d, -2.0), np.full(target.d, 4.0)


def _fit_or_none(curve: MixingCurve, window: Optional[Tuple[float, float]]) -> Optional[DecayFit]:
    try:
        return curve.fit(window)
    except FitError as exc:
        logger.warning(f"No decay fit: {exc}")
        return None


def _delta_table(config: ExperimentConfig, ctx: RunContext, times: np.ndarray) -> pd.DataFrame:
    """Fitted exponent of the soft gap process for each particle count in d_list."""
    analysis = config.analysis
    run = config.run
    potential = (config.particles.potential if config.particles is not None
                 else PotentialSpec.exponential())
    rows = []
    for d in sorted({int(d) for d in analysis["d_list"]}):
        mu = pattern_drifts(d, analysis["mu_pattern"])["soft"]
        target = ParticleConfig(d, mu, Reflection.SOFT, potential)
        curve = mixing_curve(target, _default_pair(target), times, run.n_paths,
                             derive_seed(run.seed, d), run.dt, scheme=run.scheme,
                             observe_gaps=True, max_bins=int(analysis["max_bins"]),
                             workers=ctx.workers, progress=ctx.progress)
        fit = _fit_or_none(curve, None)
        rows.append({
            "d": d,
            "delta": np.nan if fit is None else fit.delta,
            "r2": np.nan if fit is None else fit.r2,
            "n_points": 0 if fit is None else fit.n_points,
        })
        logger.info(f"delta(d = {d}) = {rows[-1]['delta']:.4g}")
    return pd.DataFrame(rows, columns=["d", "delta", "r2", "n_points"])


def run_mixing(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    target = config.target
    run = config.run
    analysis = config.analysis

    if analysis["times"] is not None:
        times = np.asarray([float(t) for t in analysis["times"]])
    else:
        times = _time_grid(run.T, run.dt, int(analysis["n_times"]))
    observe_gaps = analysis["observe_gaps"]
    if observe_gaps is None:
        observe_gaps = isinstance(target, ParticleConfig)
    pair = analysis["x0_pair"] if analysis["x0_pair"] is not None else _default_pair(target)
    if len(pair) != 2:
        raise ConfigurationError("x0_pair must hold exactly two initial states")
    window = tuple(float(t) for t in analysis["fit_window"]) if analysis["fit_window"] else None

    curve = mixing_curve(target, (pair[0], pair[1]), times, run.n_paths, run.seed, run.dt,
                         scheme=run.scheme, observe_gaps=bool(observe_gaps),
                         max_bins=int(analysis["max_bins"]), workers=ctx.workers,
                         progress=ctx.progress)
    ctx.store.write_csv("decay.csv", curve.to_frame())
    positive = curve.tv > 0
    ctx.store.write_text("decay.svg", line_chart(
        [Series("TV", curve.times[positive], curve.tv[positive]),
         Series("noise floor", curve.times, np.full(curve.times.shape, curve.noise_floor))],
        title="Total-variation decay", x_label="t", y_label="TV", log_y=True,
    ))

    fit = curve.fit(window)
    min_r2 = float(analysis["min_r2"])
    passed = fit.delta > 0 and fit.r2 >= min_r2
    summary: Dict[str, Any] = {
        "fit": fit.to_dict(),
        "noise_floor": curve.noise_floor,
        "observable": curve.observable,
        "seeds": list(curve.seeds),
        "n_paths": curve.n_paths,
        "min_r2": min_r2,
    }
    messages = [] if passed else [
        f"Decay fit rejected: delta = {fit.delta:.4g}, r2 = {fit.r2:.3g} (need delta > 0, "
        f"r2 >= {min_r2})"
    ]

    if analysis["d_list"]:
        table = _delta_table(config, ctx, times)
        ctx.store.write_csv("delta_table.csv", table)
        finite = table[np.isfinite(table["delta"]) & (table["delta"] > 0)]
        ctx.store.write_text("delta_table.svg", line_chart(
            [Series("fitted delta", finite["d"], finite["delta"])],
            title="Decay exponent by particle count", x_label="d", y_label="delta",
            log_x=True, log_y=True,
        ))
        summary["delta_table"] = table.to_dict(orient="list")
    return ExperimentResult(config.kind, passed, summary, messages)


# ==============================================================================
# rate-scaling
# ==============================================================================

def run_rate_scaling(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    analysis = config.analysis
    table = rate_scaling_table([int(d) for d in analysis["d_list"]], analysis["mu_pattern"])
    frame = pd.DataFrame({"d": table.d, "k_hard": table.k_hard, "k_soft": table.k_soft})
    ctx.store.write_csv("rate_scaling.csv", frame)
    ctx.store.write_text("rate_scaling.svg", line_chart(
        [Series("K^h (hard)", table.d, table.k_hard), Series("K^s (soft)", table.d, table.k_soft)],
        title="Gap-process drift rates", x_label="d", y_label="rate", log_x=True, log_y=True,
    ))
    summary = table.to_dict()
    summary["mu_pattern"] = analysis["mu_pattern"]
    messages = []
    if table.slope_hard is None:
        messages.append("Single particle count: no slope fitted")
    return ExperimentResult(config.kind, True, summary, messages)


# ==============================================================================
# penalty-limit
# ==============================================================================

def run_penalty_limit(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    particles = config.require_particles()
    run = config.run
    analysis = config.analysis
    table = penalty_sweep(particles, [float(b) for b in analysis["betas"]], run.T, run.n_paths,
                          run.seed, run.dt, analysis["z0"], run.scheme or Scheme.TAMED_EULER,
                          ctx.workers, ctx.progress)
    ctx.store.write_csv("penalty.csv", table.to_frame())
    ctx.store.write_text("penalty.svg", line_chart(
        [Series("KS distance", table.betas, table.distance),
         Series("noise floor", table.betas, np.full(table.betas.shape, table.noise_floor))],
        title="Soft gaps against hard gaps", x_label="beta", y_label="distance", log_x=True,
    ))
    summary = table.to_dict()
    messages = [] if table.trend_ok else [
        f"Distance is not nonincreasing: {table.inversions} inversion(s) over the noise floor "
        f"{table.noise_floor:.3g}"
    ]
    return ExperimentResult(config.kind, table.trend_ok, summary, messages)


RUNNERS: Dict[str, Callable[[ExperimentConfig, RunContext], ExperimentResult]] = {
    "validate": run_validate,
    "simulate": run_simulate,
    "drift-check": run_drift_check,
    "stationary-check": run_stationary_check,
    "mixing": run_mixing,
    "rate-scaling": run_rate_scaling,
    "penalty-limit": run_penalty_limit,
}
