"""Exception hierarchy shared by all modules."""


class AngularURError(ValueError):
    """Base class for every error raised by this package."""


class OrderOverflowError(AngularURError):
    """A polynomial order or correlation order exceeds the configured maximum."""


class DomainError(AngularURError):
    """An argument lies outside the mathematical domain of a function."""


class UnsupportedMomentError(AngularURError):
    """An azimuthal moment power outside the supported set was requested."""


class LengthMismatchError(AngularURError):
    """Sample vectors do not match each other or the quadrature grid."""


class InvalidSpecError(AngularURError):
    """A state, search or CLI specification is malformed."""


class BasisMismatchError(AngularURError):
    """An operator and a state (or two operators) live in different bases."""


class NumericalError(AngularURError):
    """A computed quantity violated a numerical sanity bound."""


class UnsupportedOperationError(AngularURError):
    """The requested operator combination cannot be evaluated exactly."""
