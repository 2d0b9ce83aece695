"""
Time discretizations of the GRBM and of the two particle systems.

All simulators are built on steppers that advance a batch of paths (one row
per path) by one step. A single trajectory is a batch of one row, so a path
simulated on its own and the same path inside an ensemble see the same noise
and the same arithmetic.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Union

import numpy as np
import pandas as pd

from ..constants import BLOWUP_NORM, MAX_DT, MAX_STEPS
from ..core.codec import format_shortest
from ..core.model import ModelSpec
from ..core.particles import ParticleConfig, Reflection
from ..core.potential import PotentialSpec
from ..errors import BlowUpError, ConfigurationError, InputError, PreconditionError
from .noise import apply_lower, cholesky, row_norms
from .rng import standard_normals

logger = logging.getLogger(__name__)


class Scheme(Enum):
    """Discretization schemes."""
    EULER_MARUYAMA = "euler_maruyama"
    TAMED_EULER = "tamed_euler"
    HARD_RECURSION = "hard_recursion"


def parse_scheme(raw: Union[str, Scheme]) -> Scheme:
    if isinstance(raw, Scheme):
        return raw
    try:
        return Scheme(raw)
    except ValueError:
        supported = ', '.join(s.value for s in Scheme)
        raise ConfigurationError(f"Unknown scheme: {raw}. Supported schemes: {supported}")


@dataclass
class Trajectory:
    """
    Time-gridded path of one simulation.

    Attributes:
        states: Array of shape (steps + 1, d); row k is the state at k * dt
        dt: Step size
        seed: Base seed of the noise stream
        scheme: Discretization that produced the states
        path_index: Noise-stream row used for this path
    """
    states: np.ndarray
    dt: float
    seed: int
    scheme: Scheme
    path_index: int = 0

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.states.shape[0]) * self.dt

    @property
    def d(self) -> int:
        return self.states.shape[1]

    @property
    def n_steps(self) -> int:
        return self.states.shape[0] - 1

    def to_frame(self) -> pd.DataFrame:
        """Table with columns t, x1, ..., xd."""
        frame = pd.DataFrame(self.states, columns=[f"x{i + 1}" for i in range(self.d)])
        frame.insert(0, "t", self.times)
        return frame

    def to_csv(self, path: Any) -> None:
        self.to_frame().to_csv(path, index=False, float_format=format_shortest, lineterminator="\n")


# ==============================================================================
# Drift functions and the elementary step
# ==============================================================================

def grbm_drift(spec: ModelSpec, x: np.ndarray) -> np.ndarray:
    """
    b(x) = mu + R U'(x) for a batch of states.

    For the tridiagonal R this is mu_i + U'(x_i) - U'(x_{i-1}) with U'(x_0) = 0.
    """
    u = np.asarray(spec.potential.uprime(x), dtype=float)
    b = np.broadcast_to(spec.mu, x.shape).copy()
    if spec.is_tridiagonal:
        b += u
        b[:, 1:] -= u[:, :-1]
        return b
    for j in range(spec.d):
        for i in range(spec.d):
            if spec.refl[i, j] != 0.0:
                b[:, i] += spec.refl[i, j] * u[:, j]
    return b


def soft_particle_drift(mu: np.ndarray, potential: PotentialSpec, z: np.ndarray) -> np.ndarray:
    """Particle drifts: mu_1 for the leader, mu_i + U'(Z_i - Z_{i-1}) for i >= 2."""
    b = np.broadcast_to(mu, z.shape).copy()
    b[:, 1:] += np.asarray(potential.uprime(z[:, 1:] - z[:, :-1]), dtype=float)
    return b


def euler_step(
    x: np.ndarray,
    drift: np.ndarray,
    dt: float,
    increment: np.ndarray,
    tamed: bool = False,
) -> np.ndarray:
    """
    One Euler step x + b dt + increment, for a batch of states.

    The tamed variant replaces b dt by b dt / (1 + dt ||b||) so the drift
    contribution never exceeds one unit per step.
    """
    if tamed:
        scale = 1.0 / (1.0 + dt * row_norms(drift))
        return x + drift * (dt * scale)[:, None] + increment
    return x + drift * dt + increment


def step_count(dt: float, T: float) -> int:
    """
    Number of steps of size dt covering [0, T].

    Raises:
        ConfigurationError: If dt is outside (0, 0.1], T < 0, T is not on the grid or too long
    """
    if not 0.0 < dt <= MAX_DT:
        raise ConfigurationError(f"dt must lie in (0, {MAX_DT}], got {dt}")
    if not T >= 0.0:
        raise ConfigurationError(f"T must be >= 0, got {T}")
    n = int(round(T / dt))
    if abs(n * dt - T) > 1e-9 * max(1.0, T):
        raise ConfigurationError(f"T = {T} is not a multiple of dt = {dt}")
    if n > MAX_STEPS:
        raise ConfigurationError(f"T/dt = {n} exceeds the limit of {MAX_STEPS} steps")
    return n


# ==============================================================================
# Steppers
# ==============================================================================

class Stepper:
    """Advances a batch of paths by one step; rows are noise-stream indices."""

    scheme: Scheme
    d: int

    def __init__(self, dt: float, seed: int, noise_scale: float = 1.0):
        self.dt = dt
        self.seed = seed
        self.noise_scale = noise_scale
        self.sqrt_dt = math.sqrt(dt)

    def increments(self, rows: np.ndarray, step: int) -> np.ndarray:
        xi = standard_normals(self.seed, rows, step, self.d)
        return xi * (self.sqrt_dt * self.noise_scale)

    def advance(self, x: np.ndarray, rows: np.ndarray, step: int) -> np.ndarray:
        raise NotImplementedError

    def check_initial(self, x0: np.ndarray) -> None:
        pass


class GRBMStepper(Stepper):
    """Euler or tamed Euler for dX = (mu + R U'(X)) dt + L dB."""

    def __init__(self, spec: ModelSpec, dt: float, seed: int,
                 scheme: Scheme = Scheme.TAMED_EULER, noise_scale: float = 1.0):
        super().__init__(dt, seed, noise_scale)
        if scheme is Scheme.HARD_RECURSION:
            raise ConfigurationError("The hard recursion only applies to hard particle systems")
        self.spec = spec
        self.d = spec.d
        self.scheme = scheme
        self.factor = cholesky(spec.gamma)

    def increments(self, rows: np.ndarray, step: int) -> np.ndarray:
        xi = standard_normals(self.seed, rows, step, self.d)
        return apply_lower(self.factor, xi) * (self.sqrt_dt * self.noise_scale)

    def advance(self, x: np.ndarray, rows: np.ndarray, step: int) -> np.ndarray:
        return euler_step(x, grbm_drift(self.spec, x), self.dt, self.increments(rows, step),
                          tamed=self.scheme is Scheme.TAMED_EULER)


class SoftParticleStepper(Stepper):
    """Particles pushed apart by U' of the gap to the particle behind."""

    def __init__(self, config: ParticleConfig, dt: float, seed: int,
                 scheme: Scheme = Scheme.TAMED_EULER, noise_scale: float = 1.0):
        super().__init__(dt, seed, noise_scale)
        if scheme is Scheme.HARD_RECURSION:
            raise ConfigurationError("Soft particles use euler_maruyama or tamed_euler")
        self.config = config
        self.d = config.d
        self.scheme = scheme

    def advance(self, x: np.ndarray, rows: np.ndarray, step: int) -> np.ndarray:
        drift = soft_particle_drift(self.config.mu, self.config.potential, x)
        return euler_step(x, drift, self.dt, self.increments(rows, step),
                          tamed=self.scheme is Scheme.TAMED_EULER)


class HardParticleStepper(Stepper):
    """Brownian TASEP: free Euler move, then each particle is pushed up to its predecessor."""

    scheme = Scheme.HARD_RECURSION

    def __init__(self, config: ParticleConfig, dt: float, seed: int, noise_scale: float = 1.0):
        super().__init__(dt, seed, noise_scale)
        self.config = config
        self.d = config.d

    def check_initial(self, x0: np.ndarray) -> None:
        if np.any(np.diff(x0, axis=-1) < 0):
            raise PreconditionError("Hard particles need z0 ordered ascending")

    def advance(self, x: np.ndarray, rows: np.ndarray, step: int) -> np.ndarray:
        z = x + self.config.mu * self.dt + self.increments(rows, step)
        for i in range(1, self.d):
            z[:, i] = np.maximum(z[:, i], z[:, i - 1])
        return z


def make_stepper(
    target: Union[ModelSpec, ParticleConfig],
    dt: float,
    seed: int,
    scheme: Optional[Scheme] = None,
    noise_scale: float = 1.0,
) -> Stepper:
    """Stepper for a GRBM or a particle system; the scheme defaults to tamed Euler."""
    if isinstance(target, ModelSpec):
        return GRBMStepper(target, dt, seed, scheme or Scheme.TAMED_EULER, noise_scale)
    if isinstance(target, ParticleConfig):
        if target.reflection is Reflection.HARD:
            return HardParticleStepper(target, dt, seed, noise_scale)
        return SoftParticleStepper(target, dt, seed, scheme or Scheme.TAMED_EULER, noise_scale)
    raise ConfigurationError(f"Cannot simulate an object of type {type(target).__name__}")


def check_state(x: np.ndarray, rows: np.ndarray, step: int) -> None:
    """
    Raise BlowUpError for the first path that is non-finite or beyond the blow-up radius.
    """
    with np.errstate(invalid='ignore', over='ignore'):
        bad = ~np.all(np.isfinite(x), axis=1) | (row_norms(x) > BLOWUP_NORM)
    if np.any(bad):
        first = int(np.argmax(bad))
        raise BlowUpError(step, int(rows[first]), "state is non-finite or beyond 1e12")


def prepare_initial(x0: Any, d: int, n: int = 1) -> np.ndarray:
    """
    Broadcast an initial state (length d) or validate a per-path array (n x d).

    Raises:
        ConfigurationError: On a shape mismatch
        InputError: On non-finite entries
    """
    x0 = np.array(x0, dtype=float)
    if x0.shape == (d,):
        x0 = np.tile(x0, (n, 1))
    if x0.shape != (n, d):
        raise ConfigurationError(f"Initial state must have shape ({d},) or ({n}, {d}), "
                                 f"got {x0.shape}")
    if not np.all(np.isfinite(x0)):
        raise InputError("Initial state must be finite")
    return x0


# ==============================================================================
# Single-path simulators
# ==============================================================================

def _simulate(stepper: Stepper, x0: Any, T: float, path_index: int) -> Trajectory:
    n_steps = step_count(stepper.dt, T)
    x = prepare_initial(x0, stepper.d)
    stepper.check_initial(x)
    rows = np.array([path_index], dtype=np.uint64)

    states = np.empty((n_steps + 1, stepper.d))
    states[0] = x[0]
    for k in range(n_steps):
        x = stepper.advance(x, rows, k)
        check_state(x, rows, k + 1)
        states[k + 1] = x[0]
    return Trajectory(states, stepper.dt, stepper.seed, stepper.scheme, path_index)


def simulate_grbm(
    spec: ModelSpec,
    x0: Any,
    dt: float,
    T: float,
    seed: int,
    scheme: Union[str, Scheme] = Scheme.TAMED_EULER,
    noise_scale: float = 1.0,
    path_index: int = 0,
) -> Trajectory:
    """
    Simulate one GRBM path.

    Args:
        spec: Model with positive definite Gamma
        x0: Initial state
        dt: Step size in (0, 0.1]
        T: Horizon, a multiple of dt
        seed: Base seed of the noise stream
        scheme: euler_maruyama or tamed_euler
        noise_scale: Multiplier of the Cholesky factor (0 gives the deterministic flow)
        path_index: Row of the noise stream

    Raises:
        BlowUpError: If the state becomes non-finite or leaves the blow-up radius
    """
    stepper = GRBMStepper(spec, dt, seed, parse_scheme(scheme), noise_scale)
    return _simulate(stepper, x0, T, path_index)


def simulate_soft_particles(
    d: int,
    mu: Any,
    pspec: PotentialSpec,
    z0: Any,
    dt: float,
    T: float,
    seed: int,
    scheme: Union[str, Scheme] = Scheme.TAMED_EULER,
    noise_scale: float = 1.0,
    path_index: int = 0,
) -> Trajectory:
    """Simulate the soft-reflection particle system with independent unit noises."""
    config = ParticleConfig(d, mu, Reflection.SOFT, pspec)
    stepper = SoftParticleStepper(config, dt, seed, parse_scheme(scheme), noise_scale)
    return _simulate(stepper, z0, T, path_index)


def simulate_hard_particles(
    d: int,
    mu: Any,
    z0: Any,
    dt: float,
    T: float,
    seed: int,
    noise_scale: float = 1.0,
    path_index: int = 0,
) -> Trajectory:
    """
    Simulate the Brownian TASEP by the sequential max recursion.

    Raises:
        PreconditionError: If z0 is not ordered ascending
    """
    config = ParticleConfig(d, mu, Reflection.HARD)
    stepper = HardParticleStepper(config, dt, seed, noise_scale)
    return _simulate(stepper, z0, T, path_index)


def gaps(traj: Trajectory) -> Trajectory:
    """
    Consecutive spacings Z_{i+1} - Z_i at every time step.

    Raises:
        PreconditionError: If the trajectory has fewer than two coordinates
    """
    if traj.d < 2:
        raise PreconditionError(f"Gaps need d >= 2, got d = {traj.d}")
    return Trajectory(np.diff(traj.states, axis=1), traj.dt, traj.seed, traj.scheme,
                      traj.path_index)
