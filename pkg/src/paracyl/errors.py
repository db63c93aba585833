"""Exception hierarchy shared across the package."""


class ParacylError(Exception):
    """Base class for all package-specific errors."""


class DomainError(ParacylError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ChartExitError(ParacylError):
    """An orbit left the coordinate chart (hit the proper transform of the axis)."""


class InversionError(ParacylError):
    """Newton inversion failed (singular Jacobian or no convergence)."""


class ConvergenceError(ParacylError):
    """An iterative estimate did not meet its tolerance within the step budget."""

    def __init__(self, message: str, last_increment: float | None = None, n: int | None = None):
        super().__init__(message)
        self.last_increment = last_increment
        self.n = n


class DegenerateFiberError(ParacylError):
    """A fiber coordinate estimate is indistinguishable from zero."""


class SamplingError(ParacylError):
    """A region sampler could not produce points (region empty at given parameters)."""


class SearchError(ParacylError):
    """A parameter search (e.g. basin radius bisection) failed."""


class ConfigError(ParacylError):
    """Invalid run configuration."""
