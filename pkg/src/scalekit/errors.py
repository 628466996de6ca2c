"""Exception hierarchy shared by every module."""


class ScalekitError(Exception):
    """Base class for all errors raised by scalekit."""


class ZeroColumn(ScalekitError, ValueError):
    pass


class NotAFrame(ScalekitError, ValueError):
    """The columns do not span the ambient space."""


class DimensionError(ScalekitError, ValueError):
    pass


class NegativeWeight(ScalekitError, ValueError):
    pass


class MaxIterations(ScalekitError, RuntimeError):
    """An iterative solver exhausted its iteration budget."""


class TraceMismatch(ScalekitError, ValueError):
    pass


class NotSPD(ScalekitError, ValueError):
    pass


class DomainError(ScalekitError, ValueError):
    pass


class FrameFormatError(ScalekitError, ValueError):
    """A frame or ellipsoid file could not be parsed."""


class NotUnitNorm(ScalekitError, ValueError):
    """A column norm differs from 1 by more than the input tolerance."""
