"""
Counter-based Gaussian noise.

Every normal draw is a pure function of (base_seed, path, step, component):
the 128-bit counter (path, step << 24 | lane) is keyed by a hash of the seed
and pushed through the splitmix64 finalizer, the top 53 bits become a uniform
in (0, 1) and pairs of uniforms go through Box-Muller. Nothing is stateful,
so any partition of paths across workers reproduces the same numbers.
"""

from typing import Union

import numpy as np

from ..errors import ConfigurationError

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1
_LANE_BITS = 24
_MAX_STEP = 1 << (64 - _LANE_BITS)
_TWO_PI = 2.0 * np.pi
_INV_2_53 = 1.0 / float(1 << 53)

IntArray = Union[int, np.ndarray]


def mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 output function on uint64 arrays (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over='ignore'):
        z = z + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MUL1
        z = (z ^ (z >> np.uint64(27))) * _MUL2
    return z ^ (z >> np.uint64(31))


def seed_key(base_seed: int) -> np.ndarray:
    """Hash a user seed (any integer in [0, 2^64)) into a stream key."""
    if isinstance(base_seed, bool) or int(base_seed) != base_seed:
        raise ConfigurationError(f"Seed must be an integer, got {base_seed!r}")
    if not 0 <= int(base_seed) <= _MASK64:
        raise ConfigurationError(f"Seed must lie in [0, 2^64), got {base_seed}")
    return mix64(np.array([int(base_seed)], dtype=np.uint64))[0]


def derive_seed(base_seed: int, tag: int) -> int:
    """An independent seed for a sub-experiment, e.g. the second ensemble of a pair."""
    key = seed_key(base_seed)
    return int(mix64(np.array([key ^ np.uint64(tag & _MASK64)], dtype=np.uint64))[0])


def uniform_block(base_seed: int, rows: IntArray, step: int, lanes: int) -> np.ndarray:
    """
    Uniforms in (0, 1) for counters (row, step, lane).

    Args:
        base_seed: Stream seed
        rows: Row (path or sample) indices, shape (n,)
        step: Step index shared by the block
        lanes: Number of lanes per row

    Returns:
        Array of shape (n, lanes)
    """
    if not 0 <= step < _MAX_STEP:
        raise ConfigurationError(f"Step index {step} out of range")
    if not 0 < lanes <= (1 << _LANE_BITS):
        raise ConfigurationError(f"Lane count {lanes} out of range")
    key = seed_key(base_seed)
    rows = np.atleast_1d(np.asarray(rows, dtype=np.uint64))
    row_hash = mix64(key ^ mix64(rows))
    counters = (np.uint64(step) << np.uint64(_LANE_BITS)) | np.arange(lanes, dtype=np.uint64)
    z = mix64(row_hash[:, None] ^ mix64(counters)[None, :])
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53


def standard_normals(base_seed: int, rows: IntArray, step: int, d: int) -> np.ndarray:
    """
    Box-Muller normals of shape (n, d) for the given rows at one step.

    Lanes 2p and 2p + 1 feed pair p, whose cosine and sine branches become
    components 2p and 2p + 1; an odd d drops the last sine.
    """
    pairs = (d + 1) // 2
    u = uniform_block(base_seed, rows, step, 2 * pairs)
    radius = np.sqrt(-2.0 * np.log(u[:, 0::2]))
    angle = _TWO_PI * u[:, 1::2]
    z = np.empty((u.shape[0], 2 * pairs))
    z[:, 0::2] = radius * np.cos(angle)
    z[:, 1::2] = radius * np.sin(angle)
    return z[:, :d]


def gaussian_step_stream(base_seed: int, path_index: int, step_index: int, d: int) -> np.ndarray:
    """
    Standard normal vector driving one step of one path.

    Identical inputs give bit-identical outputs.
    """
    return standard_normals(base_seed, np.array([path_index]), step_index, d)[0]
