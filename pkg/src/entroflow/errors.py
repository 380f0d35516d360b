"""Exception hierarchy shared by all entroflow modules."""


class EntroflowError(Exception):
    """Base class for every error raised by the package."""


class DomainError(EntroflowError, ValueError):
    """A point lies outside the set where the requested quantity is defined."""


class MissingEntropyError(EntroflowError):
    """The operation needs an entropy but the system was built without one."""


class LegendreError(EntroflowError):
    """The Legendre solve H_p(x, p) = v did not converge.

    ``last_iterate`` holds the final momentum so callers can inspect it.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class UnsupportedOperationError(EntroflowError):
    """The system lacks a structural property the operation relies on."""


class DerivativeError(EntroflowError):
    """A non-finite value was met while checking derivatives."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class BoundaryTrapError(EntroflowError):
    """A flow step could not be kept inside the domain."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ShootingError(EntroflowError):
    """No shooting start converged to the requested endpoint."""

    def __init__(self, message, best_residual=None, diagnostics=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.diagnostics = diagnostics


class EmptyScanError(EntroflowError):
    """Every grid point was excluded from an inequality scan."""


class PreconditionError(EntroflowError, ValueError):
    """A documented precondition of an operation is violated."""


class ConfigError(EntroflowError, ValueError):
    """A model configuration is malformed or violates a model invariant."""
