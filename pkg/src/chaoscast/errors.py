"""Exception hierarchy.

Three branches map onto the CLI exit codes: ConfigError -> 1,
DataError -> 2, NumericError -> 3.
"""


class ChaosCastError(Exception):
    """Base class for all package errors."""


class DataError(ChaosCastError):
    """Malformed, inconsistent, or insufficient input data."""


class ParseError(DataError):
    """CSV stream could not be parsed; message names the offending line."""


class DuplicateKeyError(DataError):
    """Two rows share the same (id, date) key."""


class DomainError(DataError):
    """A value violates a domain invariant (e.g. negative withdrawal)."""


class LengthError(DataError):
    """Series too short for the requested operation."""


class SplitError(DataError):
    """Invalid train/test split request."""


class CoverageError(DataError):
    """A weekday has no observations to estimate a seasonal factor from."""


class UnimputableError(DataError):
    """Series has no present values to impute from."""


class EmptyPanelError(DataError):
    """No series survived filtering."""


class NumericError(ChaosCastError):
    """Numerical failure: singular systems, divergence, degenerate stats."""


class SingularityError(NumericError):
    """Regression design matrix is singular (e.g. zero-variance regressor)."""


class DegenerateError(NumericError):
    """A statistic is undefined on this input (zero variance, zero distances)."""


class DivergenceError(NumericError):
    """Iterative training produced a non-finite loss or state."""


class NeighborSearchError(NumericError):
    """No admissible nearest-neighbor pairs under the given constraints."""


class FitError(ChaosCastError):
    """Model could not be fitted."""


class PredictionError(ChaosCastError):
    """Prediction inputs do not match what the model was fitted on."""


class SearchExhaustedError(ChaosCastError):
    """Every grid-search candidate failed to fit."""

    def __init__(self, message, causes=None):
        super().__init__(message)
        self.causes = causes or {}


class ConfigError(ChaosCastError):
    """Invalid configuration or unsupported option."""
