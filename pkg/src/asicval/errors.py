"""Exception hierarchy shared by every module.

The CLI maps these onto process exit codes: domain/validation problems
exit 2, data problems exit 3, a failed dual-method self-check exits 4.
"""


class AsicValError(Exception):
    """Base class for all package errors."""


class DomainError(AsicValError, ValueError):
    """An argument is outside an operation's mathematical domain."""


class WalkValidationError(DomainError):
    """Random-walk parameters violate the no-arbitrage inequalities."""


class DegenerateLatticeError(DomainError):
    """Up and down factors coincide; the lattice carries no information."""


class CalibrationError(DomainError):
    """Calibration inputs are degenerate (e.g. zero volatility)."""


class DataError(AsicValError):
    """Market data is malformed, inconsistent, or insufficient."""


class ConfigError(AsicValError):
    """A run configuration fails schema or unit validation."""


class ShortSaleError(AsicValError):
    """A replication step would require short-selling coins."""
