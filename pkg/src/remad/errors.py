"""Exception hierarchy shared by every module."""


class RemadError(Exception):
    """Base class for all errors raised by this package."""


class NonSquareError(RemadError, ValueError):
    pass


class NotHermitianError(RemadError, ValueError):
    pass


class InvalidDensityError(RemadError, ValueError):
    pass


class DimensionMismatchError(RemadError, ValueError):
    pass


class BadLengthError(RemadError, ValueError):
    pass


class OutOfDomainError(RemadError, ValueError):
    """Parameters fall outside the admissible domain (e.g. the qutrit wedge)."""


class OutOfRangeError(RemadError, ValueError):
    pass


class SingularError(RemadError, ArithmeticError):
    """A map that must be inverted is rank deficient."""


class NotOnBoundaryError(RemadError, ValueError):
    pass


class NotDegradableError(RemadError, ValueError):
    pass


class InconsistentClassificationError(RemadError, ArithmeticError):
    """Analytic and numeric degradability verdicts disagree."""
