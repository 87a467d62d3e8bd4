"""Exception types shared across the package."""

from __future__ import annotations


class LifshitzError(Exception):
    pass


class ConvergenceError(LifshitzError):
    """A quadrature or summation did not reach the requested tolerance.

    Carries the best estimate obtained so far together with its error
    estimate, so callers can decide whether the partial answer is usable.
    """

    def __init__(self, message: str, best_estimate: float, error_estimate: float):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class RegimeError(LifshitzError, ValueError):
    """Inputs are outside the validity window of an asymptotic formula."""


class PrecisionError(LifshitzError):
    """The requested quantity is smaller than the attainable noise floor."""


class TableFormatError(LifshitzError, ValueError):
    """A permittivity table failed to parse or validate.

    ``line_number`` is 1-based and refers to the offending line of the
    source text; it is None for whole-file problems (e.g. too few rows).
    """

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number
