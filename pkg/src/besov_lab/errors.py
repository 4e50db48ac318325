"""Exception hierarchy shared across the package."""


class BesovLabError(Exception):
    """Base class for all package errors."""


class DomainError(BesovLabError, ValueError):
    """A parameter lies outside the admissible range of an operation."""


class ResolutionError(BesovLabError, ValueError):
    """A grid is too coarse to represent a band-limited object without aliasing."""

    def __init__(self, message, required_N=None):
        super().__init__(message)
        self.required_N = required_N


class MalformedCoefficientsError(BesovLabError, ValueError):
    """Spectral coefficients violate conjugate symmetry."""


class PartitionRangeError(BesovLabError, ValueError):
    """A frequency exceeds the range tabulated by a dyadic partition."""


class QuadratureError(BesovLabError, ArithmeticError):
    """Quadrature did not converge before the refinement cap."""

    def __init__(self, message, last_two=None):
        super().__init__(message)
        self.last_two = last_two


class WrongEquationError(BesovLabError, ValueError):
    """A state was handed to a solution formula for the other equation."""


class SolverBlowUpError(BesovLabError, FloatingPointError):
    """A time integration produced non-finite values."""

    def __init__(self, message, last_stable_time=None):
        super().__init__(message)
        self.last_stable_time = last_stable_time


class UsageError(BesovLabError, TypeError):
    """An operation was called with an inconsistent set of arguments."""


class CFLWarning(UserWarning):
    """Explicit time step exceeds the advective stability estimate."""
