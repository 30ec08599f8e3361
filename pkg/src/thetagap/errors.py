"""Exception types shared across the toolkit."""


class ThetaGapError(Exception):
    """Base class for every error raised by this package."""


class InvalidGraphError(ThetaGapError, ValueError):
    """Malformed graph description: duplicate ids, bad lengths, disconnected."""


class InvalidPointError(ThetaGapError, ValueError):
    """A point refers to a missing vertex or edge, or its offset is out of range."""


class InvalidMetricError(ThetaGapError, ValueError):
    """A finite metric fails symmetry, nonnegativity, or the triangle inequality."""


class PreconditionError(ThetaGapError, ValueError):
    """An operation was called on input outside its documented domain."""


class InternalCheckError(ThetaGapError, RuntimeError):
    """An internal consistency check failed.  This signals a bug, not bad input."""
