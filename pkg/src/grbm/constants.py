"""
Global constants for the GRBM ergodicity toolkit.

This module centralizes the numeric thresholds, defaults and file names used
across the package: validation tolerances, certificate search parameters,
simulation guards and artifact names.
"""

from typing import Dict, Final, Tuple

# ==============================================================================
# MODEL VALIDATION
# ==============================================================================

# Componentwise symmetry tolerance for the covariance matrix
SYMMETRY_TOL: Final[float] = 1e-12

# Smallest eigenvalue of Gamma must exceed this for pd_ok
PD_TOL: Final[float] = 1e-10

# Tolerance used when comparing R against the tridiagonal queue-in-tandem form
TRIDIAGONAL_TOL: Final[float] = 1e-12

# Potential checks sample [-GRID_HALF_WIDTH/beta, GRID_HALF_WIDTH/beta]
GRID_HALF_WIDTH: Final[float] = 40.0
DEFAULT_GRID_POINTS: Final[int] = 401

# "U'(y) -> 0" and "U'(y) -> infinity" thresholds at the grid ends
VANISHING_THRESHOLD: Final[float] = 1e-12
DIVERGING_THRESHOLD: Final[float] = 1e10

# U' saturates here instead of overflowing
UPRIME_SATURATION: Final[float] = 1e300

# Skew-symmetry tolerance required by the product-form density
DENSITY_SKEW_TOL: Final[float] = 1e-10

# ==============================================================================
# SPECTRAL NORM
# ==============================================================================

POWER_ITERATION_RTOL: Final[float] = 1e-12
POWER_ITERATION_MAX_ITER: Final[int] = 100_000

# ==============================================================================
# DRIFT CERTIFICATE
# ==============================================================================

DEFAULT_EPS: Final[float] = 0.05
DEFAULT_SHELL_SAMPLES: Final[int] = 100_000
RADIUS_SEARCH_START: Final[float] = 16.0
RADIUS_SEARCH_LIMIT: Final[float] = 2.0 ** 20
SHELL_OUTER_FACTOR: Final[float] = 10.0

# ==============================================================================
# SIMULATION
# ==============================================================================

DEFAULT_DT: Final[float] = 1e-3
MAX_DT: Final[float] = 0.1
MAX_STEPS: Final[int] = 1_000_000_000
BLOWUP_NORM: Final[float] = 1e12

# Paths are integrated in fixed-size chunks regardless of the worker count
ENSEMBLE_CHUNK_SIZE: Final[int] = 4096

# ==============================================================================
# STATIONARY ANALYSIS
# ==============================================================================

# Boundary density must be below this fraction of the peak density
BOUNDARY_MASS_RATIO: Final[float] = 1e-12
QUADRATURE_RTOL: Final[float] = 1e-8
QUADRATURE_PANEL_ORDER: Final[int] = 16
# Largest tensor grid the quadrature refines to
QUADRATURE_MAX_NODES: Final[int] = 2 ** 24

MAX_HISTOGRAM_BINS: Final[int] = 64

# Only TV values inside this band enter the decay fit
FIT_TV_LOW: Final[float] = 1e-3
FIT_TV_HIGH: Final[float] = 0.5
FIT_MIN_POINTS: Final[int] = 4
LOW_R2_THRESHOLD: Final[float] = 0.8

KS_SIGNIFICANCE: Final[float] = 0.01

# ==============================================================================
# CLI / ARTIFACTS
# ==============================================================================

EXPERIMENT_KINDS: Final[Tuple[str, ...]] = (
    'validate',
    'simulate',
    'drift-check',
    'stationary-check',
    'mixing',
    'rate-scaling',
    'penalty-limit',
)

MANIFEST_FILE: Final[str] = 'manifest.json'
REPORT_FILE: Final[str] = 'report.json'

EXIT_OK: Final[int] = 0
EXIT_DOMAIN_FAILURE: Final[int] = 1
EXIT_USAGE: Final[int] = 2
EXIT_NUMERIC: Final[int] = 3

# SVG charts use a fixed viewBox
SVG_WIDTH: Final[int] = 800
SVG_HEIGHT: Final[int] = 600

# CSV headers fixed by the artifact formats
CSV_COLUMNS: Final[Dict[str, Tuple[str, ...]]] = {
    'drift_samples': ('idx', 'radius', 'lv_over_v'),
    'decay': ('t', 'tv', 'n_paths'),
    'penalty': ('beta', 'distance', 'n_paths'),
    'rate_scaling': ('d', 'k_hard', 'k_soft'),
    'delta_table': ('d', 'delta', 'r2', 'n_points'),
}
