"""Exception and warning types shared across the package."""


class WspError(ValueError):
    """Base class for all argument/state errors raised by this package."""


class ParameterError(WspError):
    """A scalar parameter is out of its documented range."""


class StructuralError(WspError):
    """Field containers disagree (grid mismatch, wrong component count, ...)."""


class InvalidFieldError(WspError):
    """Field payload contains NaN or Inf."""


class ResolutionError(WspError):
    """Grid too coarse for the requested operation."""


class RangeError(WspError):
    """Requested evaluation leaves the sampled box (no extrapolation)."""


class NotAGradientError(WspError):
    """A field required to be curl-free fails the curl check."""


class SingularityError(WspError):
    """Kernel evaluated at its singular point."""


class FormatError(WspError):
    """Malformed FLD1 payload; carries the byte offset of the failure."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class RegimeWarning(UserWarning):
    """Data decay class is outside the regime where the quoted quantity converges."""


class DecompositionWarning(UserWarning):
    """Source minus pressure gradient is far from spatially constant."""
