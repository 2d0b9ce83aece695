"""
Exception hierarchy for the GRBM toolkit.

The CLI maps these onto exit codes: configuration and input problems are
usage errors (2), violated hypotheses are domain failures (1) and numeric
breakdowns are reported separately (3).
"""

from typing import Optional


class GRBMError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(GRBMError, ValueError):
    """Inconsistent dimensions, unknown configuration keys or bad enum values."""


class InputError(GRBMError, ValueError):
    """Non-finite or otherwise unusable numeric input."""


class PreconditionError(GRBMError, ValueError):
    """An operation was called outside its documented domain."""


class StabilityError(PreconditionError):
    """A stability hypothesis (mu < 0, nu < 0, mu_tilde < 0) does not hold."""


class NumericError(GRBMError, ArithmeticError):
    """Non-convergence, singular systems or failed factorizations."""


class DomainTooSmallError(NumericError):
    """Quadrature box does not contain the density mass."""


class FitError(GRBMError):
    """Not enough usable points for a regression."""


class BlowUpError(NumericError):
    """A simulated state became non-finite or left the blow-up radius."""

    def __init__(self, step: int, path_index: Optional[int] = None, detail: str = ""):
        self.step = step
        self.path_index = path_index
        self.detail = detail
        where = f"step {step}" if path_index is None else f"path {path_index}, step {step}"
        message = f"Simulation blew up at {where}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)

    def __reduce__(self):
        # Worker processes ship errors back through pickle
        return (type(self), (self.step, self.path_index, self.detail))
