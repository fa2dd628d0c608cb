"""Exception types shared across the package."""


class HardStarError(Exception):
    """Base class for all package-specific failures."""


class DomainError(HardStarError, ValueError):
    """Inputs left the physical domain (shell inside its own horizon, density below the stiff floor, ...)."""


class ConvergenceError(HardStarError, RuntimeError):
    """An iterative solve stopped without reaching its tolerance."""

    def __init__(self, message: str, *, iterations: int | None = None, residual: float | None = None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class CflViolationError(HardStarError, ValueError):
    """A requested time step exceeds the stability limit of the explicit scheme."""


class InstabilityError(HardStarError, RuntimeError):
    """The evolved energy grew past the runaway threshold."""

    def __init__(self, message: str, *, step: int, energy_ratio: float):
        super().__init__(message)
        self.step = step
        self.energy_ratio = energy_ratio


class ConfigError(HardStarError, ValueError):
    """A run configuration could not be parsed or validated."""
