"""Error types and small checks shared by all modules."""
import numpy as np


class ParameterDomainError(ValueError):
    """A parameter lies outside the domain an operation is defined on."""


class DimensionMismatchError(ValueError):
    """Fields were built on different grids, or an array does not match its grid."""


class SymmetryViolationError(RuntimeError):
    """An inverse transform produced a non-negligible imaginary part."""


class NumericalDegeneracyError(RuntimeError):
    """A subproblem residual became non-finite."""


class DivergenceError(RuntimeError):
    """An outer iterate became non-finite.

    Attributes
    ----------
    trace : fracinv.trace.IterationTrace
        Records of every outer iteration completed before the failure.
    """
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class UndefinedMetricError(ValueError):
    """A metric was requested against a reference with zero norm."""


class MalformedFieldError(ValueError):
    """A field file could not be parsed."""


def check_finite(values, what, error=ValueError):
    """Raise `error` if `values` holds a NaN or an infinity.

    Parameters
    ----------
    values : numpy.ndarray
    what : str
        name used in the message
    error : type
        exception class to raise
    """
    if not np.all(np.isfinite(values)):
        raise error(what + " contains non-finite values")


def check_range(name, value, low=None, high=None, low_open=False, high_open=False):
    """Validate that `low <(=) value <(=) high`, raising ParameterDomainError otherwise."""
    bad = value != value  # NaN
    if low is not None:
        bad |= value <= low if low_open else value < low
    if high is not None:
        bad |= value >= high if high_open else value > high

    if bad:
        left = "(" if low_open else "["
        right = ")" if high_open else "]"
        raise ParameterDomainError(
            name + " out of range: must be in " + left + str(low if low is not None else "-inf") + ", "
            + str(high if high is not None else "inf") + right + ", got " + str(value))
