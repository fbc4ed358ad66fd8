"""Exception hierarchy shared by every kdvaw module."""


class KDVAWError(Exception):
    """Base class for all library errors."""


class InvalidParam(KDVAWError, ValueError):
    pass


class DimensionMismatch(KDVAWError, ValueError):
    pass


class NotPositiveDefinite(KDVAWError, ArithmeticError):
    pass


class DegenerateUpdate(KDVAWError, ArithmeticError):
    pass


class NoConvergence(KDVAWError, ArithmeticError):
    pass


class UnsupportedNu(KDVAWError, ValueError):
    pass


class NegativeDiscriminant(KDVAWError, ArithmeticError):
    """Raised when a pseudometric radicand is clearly negative (kernel not PSD)."""


class DomainViolation(KDVAWError, ValueError):
    pass


class PartialLayer(KDVAWError, ValueError):
    pass


class Overflow(KDVAWError, OverflowError):
    pass


class EmptyBasis(KDVAWError, ArithmeticError):
    pass


class ConfigError(KDVAWError, ValueError):
    """Invalid run configuration. ``path`` names the offending field."""

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class RepresentationError(KDVAWError, ValueError):
    pass


class ExtendedSenseViolation(KDVAWError, ValueError):
    """gamma == 1 with a moving comparator: the simplified bound is +inf."""


class HorizonExceeded(KDVAWError, RuntimeError):
    pass


class ProtocolError(KDVAWError, RuntimeError):
    """Prequential order violated (label requested before a prediction)."""
