"""Exception types raised across the package."""


class CantorSumError(Exception):
    """Base class for all package errors."""


class IdenticalSequences(CantorSumError, ValueError):
    """Two symbol paths expand to the same infinite sequence."""


class CapExceeded(CantorSumError):
    """An enumeration would exceed the configured size cap.

    ``suggested_depth`` carries the largest depth that fits, when known.
    """

    def __init__(self, message, suggested_depth=None):
        super().__init__(message)
        self.suggested_depth = suggested_depth


class SeparationViolated(CantorSumError):
    def __init__(self, message, lam=None, pair=None):
        super().__init__(message)
        self.lam = lam
        self.pair = pair


class ParameterOutOfRange(CantorSumError, ValueError):
    pass


class NoGaps(CantorSumError):
    """Thickness requested for a union with no bounded gap (thickness is +inf)."""

    value = float("inf")


class NoRoot(CantorSumError):
    pass


class DegenerateFit(CantorSumError):
    pass


class ResolutionTooCoarse(CantorSumError):
    pass


class ResolutionMismatch(CantorSumError):
    pass


class BinMismatch(CantorSumError):
    pass


class GridTooCoarse(CantorSumError):
    pass


class InfeasibleTriple(CantorSumError):
    """No exponent triple satisfies the dimension inequalities for this measure."""


class ConfigError(CantorSumError):
    """Configuration document failed validation; ``field`` names the offending path."""

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)
