"""
Deterministic Monte Carlo ensembles.

Paths are cut into fixed-size chunks whose boundaries never depend on the
worker count; each chunk is integrated as one batch and the chunks are
reassembled in path order. Path j always uses row j of the noise stream, so
the output is a pure function of (target, base_seed).
"""

import logging
import multiprocessing
from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..constants import ENSEMBLE_CHUNK_SIZE
from ..core.codec import format_shortest
from ..core.model import ModelSpec
from ..core.particles import ParticleConfig
from ..errors import ConfigurationError, PreconditionError
from .integrators import (
    Scheme,
    check_state,
    make_stepper,
    parse_scheme,
    prepare_initial,
    step_count,
)

logger = logging.getLogger(__name__)

Target = Union[ModelSpec, ParticleConfig]


@dataclass(frozen=True)
class Keep:
    """
    What an ensemble stores besides terminal states.

    every = 0 with no steps keeps terminal states only; every = k > 0 also keeps
    the state at every k-th step (including t = 0 and the terminal step); a
    non-empty steps tuple keeps exactly those step indices.
    """
    every: int = 0
    steps: Tuple[int, ...] = ()

    @classmethod
    def terminal(cls) -> "Keep":
        return cls(0)

    @classmethod
    def thinned(cls, k: int) -> "Keep":
        if k < 1:
            raise ConfigurationError(f"Thinning interval must be >= 1, got {k}")
        return cls(int(k))

    @classmethod
    def at_steps(cls, steps: Sequence[int]) -> "Keep":
        chosen = tuple(sorted({int(s) for s in steps}))
        if not chosen or chosen[0] < 0:
            raise ConfigurationError(f"Kept steps must be non-negative and non-empty, got {steps}")
        return cls(0, chosen)

    @property
    def stores_paths(self) -> bool:
        return self.every > 0 or bool(self.steps)

    def step_indices(self, n_steps: int) -> np.ndarray:
        """Step indices stored for a run of n_steps steps."""
        if self.steps:
            if self.steps[-1] > n_steps:
                raise ConfigurationError(
                    f"Kept step {self.steps[-1]} lies beyond the horizon of {n_steps} steps")
            return np.array(self.steps, dtype=np.int64)
        return kept_step_indices(n_steps, self.every)


@dataclass
class Ensemble:
    """
    Terminal states (and optionally thinned paths) of n independent paths.

    Attributes:
        n_paths: Number of paths
        terminal_states: Array of shape (n_paths, d)
        base_seed: Seed of the noise stream
        model_digest: Content hash of the simulated model or particle config
        dt: Step size
        T: Horizon
        scheme: Discretization used
        paths: Shape (n_paths, n_kept, d) when thinned paths were requested
        kept_steps: Step indices stored in paths
    """
    n_paths: int
    terminal_states: np.ndarray
    base_seed: int
    model_digest: str
    dt: float
    T: float
    scheme: Scheme
    paths: Optional[np.ndarray] = None
    kept_steps: Optional[np.ndarray] = None

    @property
    def kept_times(self) -> Optional[np.ndarray]:
        return None if self.kept_steps is None else self.kept_steps * self.dt

    def states_at_step(self, step: int) -> np.ndarray:
        """States of all paths at a kept step index."""
        if self.kept_steps is None:
            raise PreconditionError("Ensemble was run without thinned paths")
        hits = np.flatnonzero(self.kept_steps == step)
        if hits.size == 0:
            raise PreconditionError(f"Step {step} was not kept")
        return self.paths[:, hits[0], :]

    def gaps(self) -> np.ndarray:
        """Terminal gap vectors of a particle ensemble."""
        if self.terminal_states.shape[1] < 2:
            raise PreconditionError("Gaps need d >= 2")
        return np.diff(self.terminal_states, axis=1)

    def to_frame(self) -> pd.DataFrame:
        """Terminal states as a table with columns path, x1, ..., xd."""
        d = self.terminal_states.shape[1]
        frame = pd.DataFrame(self.terminal_states, columns=[f"x{i + 1}" for i in range(d)])
        frame.insert(0, "path", np.arange(self.n_paths))
        return frame

    def to_csv(self, path: Any) -> None:
        self.to_frame().to_csv(path, index=False, float_format=format_shortest, lineterminator="\n")


def _run_chunk(task: Tuple) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Integrate one chunk of paths; top-level so worker processes can unpickle it."""
    target, x0, start, dt, n_steps, seed, scheme, noise_scale, kept_steps = task
    stepper = make_stepper(target, dt, seed, scheme, noise_scale)
    rows = np.arange(start, start + x0.shape[0], dtype=np.uint64)
    x = x0.copy()
    stepper.check_initial(x)

    wanted = set() if kept_steps is None else set(kept_steps.tolist())
    kept: List[np.ndarray] = []
    if 0 in wanted:
        kept.append(x.copy())
    for k in range(n_steps):
        x = stepper.advance(x, rows, k)
        check_state(x, rows, k + 1)
        if k + 1 in wanted:
            kept.append(x.copy())
    paths = np.stack(kept, axis=1) if kept_steps is not None else None
    return x, paths


def kept_step_indices(n_steps: int, every: int) -> np.ndarray:
    steps = list(range(0, n_steps + 1, every))
    if steps[-1] != n_steps:
        steps.append(n_steps)
    return np.array(steps, dtype=np.int64)


def run_ensemble(
    target: Target,
    n_paths: int,
    dt: float,
    T: float,
    base_seed: int,
    x0: Any,
    keep: Keep = Keep.terminal(),
    scheme: Optional[Union[str, Scheme]] = None,
    noise_scale: float = 1.0,
    workers: int = 1,
    progress: bool = False,
) -> Ensemble:
    """
    Simulate n_paths independent paths of a GRBM or particle system.

    Args:
        target: ModelSpec or ParticleConfig (hard configs use the max recursion)
        n_paths: Number of paths
        dt: Step size
        T: Horizon
        base_seed: Seed of the noise stream; path j uses row j
        x0: Common initial state (length d) or one per path (n_paths x d)
        keep: Terminal states only, or thinned paths as well
        scheme: euler_maruyama or tamed_euler for GRBM and soft particles
        noise_scale: Multiplier of the noise
        workers: Worker processes; the result does not depend on this
        progress: Show a tqdm progress bar over chunks

    Raises:
        BlowUpError: Carrying the index of the first path that blew up
    """
    if n_paths < 1:
        raise ConfigurationError(f"n_paths must be >= 1, got {n_paths}")
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")
    n_steps = step_count(dt, T)
    scheme = parse_scheme(scheme) if scheme is not None else None
    d = target.d
    initial = prepare_initial(x0, d, n_paths)

    stepper = make_stepper(target, dt, base_seed, scheme, noise_scale)
    kept = keep.step_indices(n_steps) if keep.stores_paths else None
    tasks = [
        (target, initial[start:start + ENSEMBLE_CHUNK_SIZE], start, dt, n_steps, base_seed,
         scheme, noise_scale, kept)
        for start in range(0, n_paths, ENSEMBLE_CHUNK_SIZE)
    ]
    logger.info(f"Running {n_paths} paths x {n_steps} steps in {len(tasks)} chunks "
                f"on {workers} worker(s)")

    bar = tqdm(total=len(tasks), desc="Simulating", unit="chunk", disable=not progress)
    results = []
    if workers == 1 or len(tasks) == 1:
        for task in tasks:
            results.append(_run_chunk(task))
            bar.update(1)
    else:
        with multiprocessing.Pool(processes=min(workers, len(tasks))) as pool:
            for result in pool.imap(_run_chunk, tasks):
                results.append(result)
                bar.update(1)
    bar.close()

    terminal = np.concatenate([r[0] for r in results], axis=0)
    paths = None
    if kept is not None:
        paths = np.concatenate([r[1] for r in results], axis=0)
    logger.debug(f"Ensemble finished, terminal mean = {terminal.mean(axis=0).tolist()}")

    return Ensemble(
        n_paths=n_paths,
        terminal_states=terminal,
        base_seed=base_seed,
        model_digest=target.digest(),
        dt=dt,
        T=T,
        scheme=stepper.scheme,
        paths=paths,
        kept_steps=kept,
    )
