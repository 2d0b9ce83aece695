"""
Decimal codec for model documents.

Reals are written as decimal strings with 17 significant digits, which
round-trips every IEEE-754 double bit-exactly. Readers accept strings or
plain JSON numbers.
"""

import math
from typing import Any, List, Sequence

import numpy as np

from ..errors import ConfigurationError, InputError


def format_real(x: float) -> str:
    return format(float(x), '.17g')


def parse_real(raw: Any, name: str) -> float:
    if isinstance(raw, bool):
        raise ConfigurationError(f"{name} must be a real number, got {raw!r}")
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name} must be a real number, got {raw!r}") from None
    if not math.isfinite(value):
        raise InputError(f"{name} must be finite, got {raw!r}")
    return value


def encode_vector(v: np.ndarray) -> List[str]:
    return [format_real(x) for x in np.asarray(v, dtype=float).ravel()]


def encode_matrix(m: np.ndarray) -> List[List[str]]:
    return [encode_vector(row) for row in np.asarray(m, dtype=float)]


def decode_vector(raw: Any, name: str) -> np.ndarray:
    if isinstance(raw, (str, bytes)) or not isinstance(raw, Sequence):
        raise ConfigurationError(f"{name} must be a list of reals")
    return np.array([parse_real(x, f"{name}[{i}]") for i, x in enumerate(raw)], dtype=float)


def decode_matrix(raw: Any, name: str) -> np.ndarray:
    if isinstance(raw, (str, bytes)) or not isinstance(raw, Sequence):
        raise ConfigurationError(f"{name} must be a row-major list of rows")
    rows = [decode_vector(row, f"{name}[{i}]") for i, row in enumerate(raw)]
    if rows and len({len(r) for r in rows}) != 1:
        raise ConfigurationError(f"{name} rows have different lengths")
    return np.array(rows, dtype=float).reshape(len(rows), -1)


def format_shortest(x: float) -> str:
    """Shortest decimal that round-trips, used for CSV tables."""
    return repr(float(x))
