"""
Distances between empirical and analytic laws.

Histograms carry an underflow and an overflow cell on every axis, so mass that
falls outside the edges still counts towards the normalization and towards TV.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Sequence

import numpy as np
from scipy import stats

from ..constants import KS_SIGNIFICANCE, MAX_HISTOGRAM_BINS
from ..errors import ConfigurationError, PreconditionError


@dataclass
class Histogram:
    """
    Normalized bin masses on fixed edges.

    Attributes:
        dims: 1 or 2
        edges: Sorted bin edges per dimension
        mass: Array of shape (len(edges[0]) + 1, ...); index 0 and -1 along each
            axis are the underflow and overflow cells
        n_samples: Number of samples binned
    """
    dims: int
    edges: List[np.ndarray]
    mass: np.ndarray
    n_samples: int

    def same_grid(self, other: "Histogram") -> bool:
        return (self.dims == other.dims
                and all(np.array_equal(a, b) for a, b in zip(self.edges, other.edges)))


def _as_samples(samples: np.ndarray) -> np.ndarray:
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.ndim != 2:
        raise ConfigurationError(f"Samples must be n x d, got shape {samples.shape}")
    return samples


def freedman_diaconis_edges(values: np.ndarray, max_bins: int = MAX_HISTOGRAM_BINS) -> np.ndarray:
    """
    Equal-width edges with the Freedman-Diaconis width 2 IQR n^{-1/3}, at most max_bins bins.
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise PreconditionError("Cannot build edges from an empty sample")
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        return np.array([lo - 0.5, hi + 0.5])
    q75, q25 = np.percentile(values, [75, 25])
    width = 2.0 * (q75 - q25) * values.size ** (-1.0 / 3.0)
    n_bins = max_bins if width <= 0 else min(max_bins, max(1, math.ceil((hi - lo) / width)))
    return np.linspace(lo, hi, n_bins + 1)


def pooled_edges(samples: Sequence[np.ndarray],
                 max_bins: int = MAX_HISTOGRAM_BINS) -> List[np.ndarray]:
    """Per-dimension Freedman-Diaconis edges of several sample sets pooled together."""
    pooled = np.concatenate([_as_samples(s) for s in samples], axis=0)
    return [freedman_diaconis_edges(pooled[:, j], max_bins) for j in range(pooled.shape[1])]


def empirical_histogram(samples: np.ndarray, edges: Sequence[np.ndarray]) -> Histogram:
    """
    Bin samples (n x d, d <= 2) on the given edges.

    Raises:
        PreconditionError: If samples are empty or d > 2
    """
    samples = _as_samples(samples)
    n, d = samples.shape
    if n == 0:
        raise PreconditionError("Cannot build a histogram from an empty sample")
    if d > 2:
        raise PreconditionError(f"Histograms support d <= 2, got d = {d}")
    edges = [np.asarray(e, dtype=float) for e in edges]
    if len(edges) != d:
        raise ConfigurationError(f"Need {d} edge arrays, got {len(edges)}")
    for e in edges:
        if e.ndim != 1 or e.size < 2 or np.any(np.diff(e) <= 0):
            raise ConfigurationError("Edges must be strictly increasing with at least 2 entries")

    shape = tuple(e.size + 1 for e in edges)
    index = [np.searchsorted(e, samples[:, j], side='right') for j, e in enumerate(edges)]
    flat = np.ravel_multi_index(index, shape)
    counts = np.bincount(flat, minlength=int(np.prod(shape))).reshape(shape)
    return Histogram(d, edges, counts / n, n)


def tv_distance(p: Histogram, q: Histogram) -> float:
    """
    Half the L1 distance between bin masses, in [0, 1].

    Raises:
        PreconditionError: If the histograms use different edges
    """
    if not p.same_grid(q):
        raise PreconditionError("TV distance needs histograms on identical edges")
    return float(min(1.0, 0.5 * np.sum(np.abs(p.mass - q.mass))))


def tv_noise_floor(mass: np.ndarray, n_a: int, n_b: int) -> float:
    """
    Expected histogram TV between two independent samples of the same law.

    Each cell difference is roughly normal with variance p(1-p)(1/n_a + 1/n_b),
    whose mean absolute value is sqrt(2 var / pi).
    """
    mass = np.asarray(mass, dtype=float).ravel()
    var = mass * (1.0 - mass) * (1.0 / n_a + 1.0 / n_b)
    return float(0.5 * np.sum(np.sqrt(2.0 * var / math.pi)))


def marginal_tv(samples_a: np.ndarray, samples_b: np.ndarray,
                edges: Sequence[np.ndarray]) -> float:
    """Largest 1-d histogram TV over coordinates."""
    a, b = _as_samples(samples_a), _as_samples(samples_b)
    return max(
        tv_distance(empirical_histogram(a[:, j], [edges[j]]),
                    empirical_histogram(b[:, j], [edges[j]]))
        for j in range(a.shape[1])
    )


def ks_distance_1d(samples: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """sup |F_n - F| over the sample points."""
    return float(stats.kstest(np.asarray(samples, dtype=float).ravel(), cdf).statistic)


@dataclass
class KSResult:
    """One-sample Kolmogorov-Smirnov outcome."""
    statistic: float
    pvalue: float
    n: int
    alpha: float

    @property
    def passed(self) -> bool:
        return self.pvalue >= self.alpha

    @property
    def critical_value(self) -> float:
        """Two-sided critical value of the Kolmogorov distribution at level alpha."""
        return float(stats.kstwo.ppf(1.0 - self.alpha, self.n))

    def to_dict(self):
        return {"statistic": self.statistic, "pvalue": self.pvalue, "n": self.n,
                "alpha": self.alpha, "passed": self.passed}


def ks_test_1d(samples: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray],
               alpha: float = KS_SIGNIFICANCE) -> KSResult:
    """Kolmogorov-Smirnov test of samples against an analytic CDF."""
    samples = np.asarray(samples, dtype=float).ravel()
    result = stats.kstest(samples, cdf)
    return KSResult(float(result.statistic), float(result.pvalue), samples.size, alpha)


def ks_distance_2samp(a: np.ndarray, b: np.ndarray) -> float:
    """Largest two-sample KS statistic over coordinates."""
    a, b = _as_samples(a), _as_samples(b)
    if a.shape[1] != b.shape[1]:
        raise ConfigurationError("Sample sets have different dimensions")
    return max(float(stats.ks_2samp(a[:, j], b[:, j]).statistic) for j in range(a.shape[1]))
