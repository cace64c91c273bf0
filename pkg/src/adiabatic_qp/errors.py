"""Exception hierarchy. Each class maps to one CLI exit code."""


class AdiabaticError(Exception):
    exit_code = 1


class InvalidInputError(AdiabaticError, ValueError):
    exit_code = 2


class ConfigError(InvalidInputError):
    """Bad run configuration; `field` names the offending key."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ResourceLimitError(AdiabaticError):
    exit_code = 3


class AccuracyError(AdiabaticError):
    """A numerical tolerance could not be met."""
    exit_code = 3


class ContinuationError(AccuracyError):
    pass


class WindowExhaustedError(InvalidInputError):
    """Energy lies outside the resolved band-structure window."""


class DegenerateMultiplierError(InvalidInputError):
    pass


class DegenerateGeometryError(AdiabaticError):
    """Tangential crossing or similar; `where` is the offending point."""
    exit_code = 3

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(message)


class UnsupportedOrderError(AdiabaticError):
    exit_code = 3


class InconsistencyError(AdiabaticError):
    exit_code = 4


class NearBranchPointWarning(UserWarning):
    pass
