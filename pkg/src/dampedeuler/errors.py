"""Exception types shared across the package.

Exit-code mapping used by the CLI: ConfigError -> 1, VacuumError /
InstabilityError -> 2, FitFailureError / InsufficientDataError -> 3.
"""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation (e.g. u <= 0)."""


class VacuumError(RuntimeError):
    """Specific volume left the valid range: u <= u_floor or the invariant
    bracket (s - r)/2 + 2/(gamma - 1) became non-positive."""


class InstabilityError(RuntimeError):
    """Non-finite values appeared in an evolving field."""


class DivergenceError(RuntimeError):
    """An improper integral failed to converge (damping integrability violated)."""


class FitFailureError(RuntimeError):
    """Life-span extrapolation could not produce a usable intercept."""


class InsufficientDataError(RuntimeError):
    """Too few blow-up rows to fit a scaling law."""


class ConfigError(ValueError):
    """Malformed or invalid configuration; message names the offending key."""
