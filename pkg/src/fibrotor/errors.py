"""Exception hierarchy shared by all fibrotor modules."""


class FibrotorError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FibrotorError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UsageError(FibrotorError, ValueError):
    """An operation was invoked with an inconsistent or unsupported configuration."""


class IntegrityError(FibrotorError, RuntimeError):
    """A state or artifact violates one of its declared invariants."""


class TruncationError(FibrotorError, RuntimeError):
    """Probability leaked into the guard zone at the edge of the momentum window."""

    def __init__(self, message: str, step: int, leakage: float):
        super().__init__(message)
        self.step = step
        self.leakage = leakage


class NumericError(FibrotorError, RuntimeError):
    """A numerical kernel (eigensolver, fit) failed to converge or produced garbage."""


class FitError(FibrotorError, ValueError):
    """Not enough usable samples for a requested fit."""


class ResourceError(FibrotorError, RuntimeError):
    """A request exceeds the configured size or runtime guard."""
