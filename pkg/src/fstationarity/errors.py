"""Exception hierarchy shared across the package."""


class FStationarityError(Exception):
    """Base class for all package errors."""


class DimensionError(FStationarityError, ValueError):
    """Array shapes do not agree with the declared grid or axes."""


class InvalidLagError(FStationarityError, ValueError):
    """A lag outside ``0 <= h <= T - 2`` was requested."""


class ConfigurationError(FStationarityError, ValueError):
    """Tuning parameters violate their documented domains."""


class DegenerateSeriesError(FStationarityError, ValueError):
    """The data carry no variation that a procedure can work with."""


class ParseError(FStationarityError, ValueError):
    """A CSV input is malformed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
