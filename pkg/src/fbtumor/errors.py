"""Exception hierarchy shared by all solvers."""


class FBTumorError(Exception):
    """Base class for every error raised by the package."""


class DomainError(FBTumorError, ValueError):
    """An argument lies outside the domain of a function or model."""


class RangeError(FBTumorError, ValueError):
    """A root bracket could not be established."""


class ConvergenceError(FBTumorError, ArithmeticError):
    """An iterative procedure failed to reach its tolerance."""


class DelayTooLargeError(ConvergenceError):
    """The delayed pressure map is not a contraction at the requested delay."""

    def __init__(self, message, ratio=None):
        super().__init__(message)
        self.ratio = ratio


class ConsistencyError(FBTumorError, RuntimeError):
    """A characteristic left the region where the pressure is defined."""


class InvariantViolation(FBTumorError, AssertionError):
    """A mathematical invariant that should always hold was violated."""


class StepSizeError(FBTumorError, RuntimeError):
    """The time step is too large for the requested accuracy."""


class DivergenceError(FBTumorError, RuntimeError):
    """A trajectory left every plausible bound."""


class HistoryUnderrunError(FBTumorError, RuntimeError):
    """The stored history does not cover the full delay window."""
