"""Exception hierarchy shared by every module.

All failures raised by the library derive from FrontlabError so the CLI can
map them onto exit codes: configuration problems are raised as ParseError or
ValidationError, missing-solution geometry as NoSolutionError subclasses, and
everything else numerical as NumericalError subclasses.
"""
from __future__ import annotations

__all__ = [
    "FrontlabError",
    "ParseError",
    "ValidationError",
    "NumericalError",
    "OutOfWindow",
    "RootFindingFailed",
    "SaddleMissing",
    "EscapeWithoutEvent",
    "NoSolutionError",
    "NoIntersection",
    "HiddenConditionViolated",
    "NotSaddle",
    "BisectionBracketFailed",
    "OrderViolated",
    "NoSolution",
    "DegenerateDenominator",
    "QuadratureNotConverged",
    "DegenerateGStar",
    "DegenerateMStar",
    "GridTooCoarse",
    "NoConvergence",
    "BranchJump",
    "BlowUp",
    "NoCrossing",
    "WindowTooShort",
    "Nonlinear",
]


class FrontlabError(Exception):
    """Base class for all library errors."""


class ParseError(FrontlabError):
    """Config text does not match the key = value grammar."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class ValidationError(FrontlabError):
    """Config parsed but failed semantic validation."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class NumericalError(FrontlabError):
    """A numerical procedure failed to produce a trustworthy result."""


class NoSolutionError(FrontlabError):
    """The requested mathematical object does not exist for these inputs."""


# model_catalog

class OutOfWindow(FrontlabError):
    """v lies outside the requested branch window."""


class RootFindingFailed(NumericalError):
    """Bracketing exhausted its subdivisions; carries any partial result."""

    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


# geometry

class SaddleMissing(NoSolutionError):
    """The requested slow manifold has no saddle equilibrium."""


class EscapeWithoutEvent(NumericalError):
    """Slow-orbit integration hit its cap before any stopping event."""


class NoIntersection(NoSolutionError):
    """W^u and W^s projections do not intersect (existence fails)."""

    def __init__(self, message: str, tangency: bool = False):
        self.tangency = tangency
        super().__init__(message)


class HiddenConditionViolated(NoSolutionError):
    """Intersection found, but outside the overlap of the branch windows."""


class NotSaddle(NoSolutionError):
    """A fast-system endpoint is not a saddle (fold reached)."""


class BisectionBracketFailed(NumericalError):
    """Speed bisection could not bracket a sign change."""


class OrderViolated(FrontlabError):
    """Cubic roots not strictly ordered beta- < beta_c < beta+."""


class NoSolution(NoSolutionError):
    """The small-tau speed scan found no root."""


class DegenerateDenominator(NumericalError):
    """G*.I_f vanished in the bifurcation balance."""


# criteria

class QuadratureNotConverged(NumericalError):
    """Adaptive quadrature failed its tolerance, or a tail diverges."""


class DegenerateGStar(NumericalError):
    """|G*| below the degeneracy tolerance; lambda2c undefined."""


class DegenerateMStar(NumericalError):
    """M* within tolerance of its pole; small-tau lambda2c undefined."""


# spectral

class GridTooCoarse(FrontlabError):
    """Grid spacing does not resolve the fast-jump width."""


class NoConvergence(NumericalError):
    """Shift-invert iteration missed its residual tolerance."""


class BranchJump(NumericalError):
    """Eigenvalue continuation jumped branches between ell values."""


# sim2d

class BlowUp(NumericalError):
    """A field exceeded the magnitude bound during time stepping."""

    def __init__(self, message: str, t: float, where: tuple[int, int]):
        self.t = t
        self.where = where
        super().__init__(message)


class NoCrossing(FrontlabError):
    """A grid row has no interface crossing of the mid level."""


class WindowTooShort(FrontlabError):
    """Growth-rate fit window holds too few samples."""


class Nonlinear(FrontlabError):
    """Mode amplitude left the linear regime inside the fit window."""
