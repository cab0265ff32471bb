"""Exception types raised by limview."""


class LimviewError(Exception):
    """Base class for all library errors."""


class ValidationError(LimviewError, ValueError):
    """A configuration or input violates a documented invariant."""


class DegenerateTangent(LimviewError, ValueError):
    pass


class NotInside(LimviewError, ValueError):
    pass


class NonUniformGrid(LimviewError, ValueError):
    pass


class OutOfRange(LimviewError, ValueError):
    pass


class GridOutsideDomain(LimviewError, ValueError):
    pass


class ProbeOutsideGrid(LimviewError, ValueError):
    pass


class EmptySampleSet(LimviewError, ValueError):
    pass


class FormatError(LimviewError, ValueError):
    """Raw payload and JSON header disagree."""


class IoFailure(LimviewError, OSError):
    pass
