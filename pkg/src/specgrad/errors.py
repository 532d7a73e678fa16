"""Exception types raised at the package's validation boundaries."""


class SpecgradError(Exception):
    """Base class for all specgrad errors."""


class NotPowerOfTwoError(SpecgradError, ValueError):
    """Transform length or window support is not a power of two."""


class NonFiniteInputError(SpecgradError, ValueError):
    """NaN or Inf reached a transform boundary."""


class InvalidThetaError(SpecgradError, ValueError):
    """Window length outside its admissible range."""


class InvalidShiftError(SpecgradError, ValueError):
    """Fractional window shift outside [0, 1)."""


class InvalidGridError(SpecgradError, ValueError):
    """Frame grid is malformed or has the wrong variant."""


class InvalidAlphaError(SpecgradError, ValueError):
    """Overlap ratio outside (0, 1]."""


class ShapeMismatchError(SpecgradError, ValueError):
    """Matrix operands disagree in shape."""


class LengthMismatchError(SpecgradError, ValueError):
    """Paired sequences disagree in length."""


class NyquistViolationError(SpecgradError, ValueError):
    """Frequency law leaves (0, sample_rate / 2)."""


class UnsupportedFormatError(SpecgradError, ValueError):
    """WAV file is valid RIFF but not PCM16 mono."""


class MalformedHeaderError(SpecgradError, ValueError):
    """WAV byte stream is not a well-formed RIFF/WAVE file."""


class NonFiniteLossError(SpecgradError, RuntimeError):
    """Optimizer hit a non-finite loss or gradient.

    Carries the partial trace accumulated up to and including the
    offending evaluation so callers can flush it before aborting.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
