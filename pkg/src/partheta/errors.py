"""Exception hierarchy. Each family maps to one CLI exit code."""


class PartialThetaError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class DomainError(PartialThetaError, ValueError):
    """An argument lies outside the domain of the operation (|q| >= 1, x = 0, ...)."""

    exit_code = 2


class InvalidBracket(DomainError):
    pass


class PrecisionBudgetExceeded(PartialThetaError, ArithmeticError):
    """Double precision cannot deliver the requested accuracy for these arguments."""

    exit_code = 3


class CertificationError(PartialThetaError):
    """A numerical certificate could not be established."""

    exit_code = 4


class ContourError(CertificationError):
    """The contour passes too close to a zero, or the winding is not an integer."""


class IncompleteZeroSet(CertificationError):
    def __init__(self, message, found=None, winding=None):
        super().__init__(message)
        self.found = found
        self.winding = winding


class TailRegimeNotReached(CertificationError):
    def __init__(self, message, k=None, count=None):
        super().__init__(message)
        self.k = k
        self.count = count


class ConvergenceError(CertificationError):
    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class NearSpectralAmbiguity(CertificationError):
    """A conjugate pair sits within the collision band of the real axis."""


class NonMonotonicPairCount(CertificationError):
    pass
