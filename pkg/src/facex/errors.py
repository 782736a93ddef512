"""Exception types shared across the package."""


class FacexError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(FacexError, ValueError):
    """An input violates a documented precondition or shape contract."""


class NotFoundError(FacexError, LookupError):
    """A named resource (preset, sample, checkpoint, session) does not exist."""


class NotReadyError(FacexError, RuntimeError):
    """An operation requires trained weights that have not been loaded."""
