"""
Correlated Brownian increments from a Cholesky factor of Gamma.

Matrix-vector products are written as explicit column loops so the
floating-point summation order is fixed and does not depend on how many
paths are stacked in a batch.
"""

import numpy as np

from ..errors import NumericError


def cholesky(gamma: np.ndarray) -> np.ndarray:
    """
    Lower-triangular L with L L^T = Gamma.

    Raises:
        NumericError: If a pivot is not positive
    """
    gamma = np.asarray(gamma, dtype=float)
    try:
        return np.linalg.cholesky(gamma)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"Cholesky factorization failed: {exc}") from exc


def apply_lower(factor: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """
    Rows of xi mapped through the lower-triangular factor, i.e. xi @ factor.T.

    Args:
        factor: d x d lower-triangular matrix
        xi: Standard normals of shape (n, d)
    """
    d = factor.shape[0]
    out = np.zeros_like(xi)
    for j in range(d):
        column = factor[:, j]
        for i in range(j, d):
            if column[i] != 0.0:
                out[:, i] += column[i] * xi[:, j]
    return out


def row_norms(x: np.ndarray) -> np.ndarray:
    """Euclidean norm of each row, accumulated column by column."""
    acc = np.zeros(x.shape[0])
    for j in range(x.shape[1]):
        acc += x[:, j] * x[:, j]
    return np.sqrt(acc)
