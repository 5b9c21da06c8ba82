"""Exception hierarchy shared by all tfsqueeze modules."""


class TFSqueezeError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(TFSqueezeError):
    """A precondition on an operation's parameters was violated."""


class ShapeMismatchError(TFSqueezeError):
    """Two objects that must share axes or lengths do not."""


class NonInvertibleGridError(TFSqueezeError):
    """Reconstruction requested from a grid without a finite reconstruction factor."""


class IFOutOfRangeError(TFSqueezeError):
    """An instantaneous-frequency value falls outside the grid's frequency axis."""


class DegenerateGridError(TFSqueezeError):
    """An operation that needs nonzero grid energy received an all-zero grid."""


class NoGroundTruthError(TFSqueezeError):
    """A metric requiring a ground-truth mode model was called without one."""


class FormatError(TFSqueezeError):
    """A file could not be parsed; the message carries the offending position."""


class UnsupportedFormatError(TFSqueezeError):
    """The file is readable but uses a variant this library does not accept."""
