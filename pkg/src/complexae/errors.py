"""Exception types shared across the package."""


class ComplexAEError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(ComplexAEError):
    """Operands have incompatible dimensions."""


class ConfigError(ComplexAEError):
    """Invalid configuration value (bad flag, bad hyperparameter, bad file)."""


class DataError(ComplexAEError):
    """Dataset-level problem (e.g. not enough samples of a class)."""


class SingularityError(ComplexAEError):
    """An activation was evaluated exactly at one of its poles."""


class DivergenceError(ComplexAEError):
    """A forward pass produced non-finite values; the run has diverged."""


class EvaluationError(ComplexAEError):
    """A numerically differentiated function returned a non-finite value.

    Carries the perturbed evaluation point in ``point``.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class IdxParseError(DataError):
    """Base class for IDX container parse failures; ``offset`` is the byte
    position at which the problem was detected."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class BadMagicError(IdxParseError):
    """IDX file does not start with the expected magic number."""


class TruncatedFileError(IdxParseError):
    """IDX file ends before the data promised by its header."""


class CountMismatchError(IdxParseError):
    """Image file and label file disagree on the number of items."""
