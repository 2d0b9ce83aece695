"""
Stationary densities, empirical distances, decay fits and the penalty limit.
"""

from .density import (
    Box,
    DensitySpec,
    density_spec,
    marginal_cdf,
    normalize_density,
    product_log_density,
)
from .distances import (
    Histogram,
    empirical_histogram,
    ks_distance_1d,
    ks_distance_2samp,
    ks_test_1d,
    tv_distance,
)
from .decay import DecayFit, MixingCurve, fit_decay_exponent, mixing_curve
from .tails import TailEstimate, tail_functional
from .penalty import PenaltyTable, count_inversions, penalty_sweep

__all__ = [
    "Box",
    "DensitySpec",
    "density_spec",
    "marginal_cdf",
    "normalize_density",
    "product_log_density",
    "Histogram",
    "empirical_histogram",
    "tv_distance",
    "ks_distance_1d",
    "ks_distance_2samp",
    "ks_test_1d",
    "DecayFit",
    "MixingCurve",
    "fit_decay_exponent",
    "mixing_curve",
    "TailEstimate",
    "tail_functional",
    "PenaltyTable",
    "count_inversions",
    "penalty_sweep",
]
