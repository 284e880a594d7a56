"""Module containing all exceptions for revivalkit."""


class RevivalKitError(Exception):
    """Base-class for all exceptions raised by revivalkit."""

    pass


class ModelError(RevivalKitError):
    """Error raised when a lattice, local term or model is invalid."""

    pass


class DimensionError(ModelError):
    """A dense dimension exceeds the cap or two dimensions disagree."""

    pass


class DiagonalizationError(RevivalKitError):
    """The dense eigensolver failed or produced an inaccurate result."""

    pass


class NumericalError(RevivalKitError):
    """A quantity that is mathematically well defined came out invalid."""

    pass


class NormalizationError(RevivalKitError):
    """A state or an energy distribution is not normalized."""

    pass


class GridError(RevivalKitError):
    """A time grid is empty, too coarse, or too short for the request."""

    pass


class DomainError(RevivalKitError):
    """A parameter lies outside the range where a bound is defined."""

    pass


class ParsingError(RevivalKitError):
    """Error raised when there's an error parsing an input file."""

    def __init__(self, message: str, row: int = 0) -> None:
        """Record the 1-based row number of the offending line, if any."""
        if row:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class ConfigError(RevivalKitError):
    """The experiment configuration is invalid."""

    pass


class StorageBackendError(RevivalKitError):
    """Base error for exceptions raised from Storage backends."""

    pass


class ConflictError(StorageBackendError):
    """The backend already holds a different artifact under that name."""

    pass


class MissingArtifactError(StorageBackendError):
    """A requested artifact has not been produced yet."""

    pass


class OracleRangeWarning(UserWarning):
    """A closed-form quantity was requested outside its index range."""

    pass
