"""Exception types raised by the toolkit."""


class InsufficientDataError(ValueError):
    """Raised when an analysis stage receives too few samples to be well posed."""


class EmptyResultError(RuntimeError):
    """Raised when a search finishes without a single usable result."""
