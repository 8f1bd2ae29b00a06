"""Exception taxonomy shared across the toolkit.

The HTTP layer maps these onto its closed set of wire error codes, so new
failure modes belong here rather than in ad-hoc ValueErrors.
"""


class TemplatingError(Exception):
    """Base class for all toolkit errors."""


class InvalidGeometryError(TemplatingError):
    """Non-finite coordinates or a degenerate polygon."""


class CalibrationError(TemplatingError):
    """Non-positive or non-finite pixel scale factor."""


class InvalidMeasurementError(TemplatingError):
    """Zero-length or otherwise unusable diameter measurement."""


class NotFoundError(TemplatingError):
    """A catalog entry, session, or stored plan does not exist."""


class StateError(TemplatingError):
    """A planning operation arrived out of order."""


class CalibrationMissingError(StateError):
    """A measurement was submitted before calibration was set."""


class ConsistencyError(TemplatingError):
    """A plan's recorded size disagrees with its own measurement."""


class ParseError(TemplatingError):
    """Malformed catalog, plan, or CSV input.

    ``line`` is 1-based when the failure is tied to a specific input line;
    ``field`` names the missing or offending key when known.
    """

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        super().__init__(message)
        self.line = line
        self.field = field


class StorageError(TemplatingError):
    """The plan store cannot read or write its directory."""


class EmptyDatasetError(TemplatingError):
    """An evaluation was requested over zero measurement pairs."""


class ValidationError(TemplatingError):
    """Semantically invalid input values (odd sizes, bad ranges)."""
