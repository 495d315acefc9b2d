"""Exception types raised across the package."""


class CritOrbitError(Exception):
    """Base class for all package errors."""


class DegreeCapExceeded(CritOrbitError):
    pass


class Inconclusive(CritOrbitError):
    """Activity could not be decided within the iteration budget."""

    def __init__(self, message, degrees=()):
        super().__init__(message)
        self.degrees = list(degrees)


class RootFindFailure(CritOrbitError):
    pass


class ConvergenceFailure(RootFindFailure):
    pass


class ZeroPolynomial(CritOrbitError):
    """The equation vanishes identically: the marked point is persistently preperiodic."""


class NotActive(CritOrbitError):
    pass


class OutsideDomain(CritOrbitError):
    pass


class NotInDomain(OutsideDomain):
    pass


class TruncationInsufficient(CritOrbitError):
    pass


class WindowMismatch(CritOrbitError):
    pass


class WindowContainsOrigin(CritOrbitError):
    pass


class DegenerateLift(CritOrbitError):
    pass


class OriginUndefined(CritOrbitError):
    pass


class DiagonalPole(CritOrbitError):
    pass


class ProbeInsideSet(CritOrbitError):
    pass


class NoIntegerRootDegree(CritOrbitError):
    pass


class NoSolution(CritOrbitError):
    pass
