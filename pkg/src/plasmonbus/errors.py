"""Exception types raised across the package."""


class PlasmonBusError(Exception):
    """Base class for all errors raised by plasmonbus."""


class DomainError(PlasmonBusError, ValueError):
    """An argument lies outside the mathematical or physical domain."""


class NoRootError(PlasmonBusError):
    """A root could not be bracketed.

    ``limit`` carries the relevant bound (e.g. the dispersion asymptote) when
    one is known.
    """

    def __init__(self, message, limit=None):
        super().__init__(message)
        self.limit = limit


class ConvergenceError(PlasmonBusError):
    """An iterative or stepping procedure failed its accuracy check."""


class InvariantError(PlasmonBusError):
    """A density matrix or state vector violated a physical invariant."""


class ConfigError(PlasmonBusError, ValueError):
    """Invalid configuration: bad key, unparsable value, or failed validation."""

    def __init__(self, message, line=None, field=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
        self.field = field


class PlasmonBusWarning(UserWarning):
    """Base class for warnings issued by plasmonbus."""


class WindowWarning(PlasmonBusWarning):
    """An integration window truncates a non-negligible part of a pulse."""


class AdiabaticityWarning(PlasmonBusWarning):
    """A gate schedule leaks out of the computational subspace."""


class BoundaryOptimumWarning(PlasmonBusWarning):
    """An optimizer returned a point on the boundary of its search box."""
