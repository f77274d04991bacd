"""Exception hierarchy shared by all deltasketch modules."""


class DeltaSketchError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(DeltaSketchError, ValueError):
    """A constructor or operation received an out-of-range parameter."""


class ParameterMismatchError(DeltaSketchError, ValueError):
    """Two sketches with incompatible parameters were combined.

    The message names the first differing field.
    """


class MissingPowerError(DeltaSketchError, KeyError):
    """A rolling-window update was requested for a length with no
    precomputed base power."""


class CapacityExceededError(DeltaSketchError, RuntimeError):
    """More bytes were pushed than the declared maximum stream length."""


class NonResumableError(DeltaSketchError, RuntimeError):
    """extend() was called on a sketch that cannot be extended
    (for example, the result of a merge)."""


class SketchFormatError(DeltaSketchError, ValueError):
    """A serialized sketch had a bad magic value, unknown version,
    or corrupted/truncated payload."""


class SentinelPositionError(DeltaSketchError, ValueError):
    """LF was requested at the terminator position of the BWT."""


class WrongPhaseError(DeltaSketchError, RuntimeError):
    """A bookmark was initialized at the wrong stream length."""
