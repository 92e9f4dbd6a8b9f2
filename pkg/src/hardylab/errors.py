"""Exception types shared across the laboratory modules."""


class HardyLabError(Exception):
    """Base class for all laboratory errors."""


class OnAxisError(HardyLabError):
    """Evaluation requested on (or too close to) the singular z-axis."""


class StencilCrossesAxisError(HardyLabError):
    """A finite-difference stencil would cross the singular z-axis."""


class QuadratureNotConvergedError(HardyLabError):
    """Adaptive quadrature refinement stalled before reaching tolerance."""


class NonFiniteSampleError(HardyLabError):
    """A field evaluator produced a non-finite value on the quadrature segment."""


class NonPositiveProfileError(HardyLabError):
    """A weight profile must be strictly positive on its grid."""


class NonPositiveFError(HardyLabError):
    """The convexity functional must be strictly positive for the b-curve solve."""


class GateClosedError(HardyLabError):
    """1 - a(t) b(t) <= 0 somewhere: the multiplicative update is not defined."""


class NoRealRootError(HardyLabError):
    """mu > 1/8 (equivalently alpha*beta < 4): no real root of mu = R/(4(1+R^2))."""


class IterationBudgetExceededError(HardyLabError):
    """The iteration reached its step budget without any verdict."""


class OutOfDomainError(HardyLabError):
    """A rescaled spatial argument left the sampled grid."""


class WeightExceedsDecayError(HardyLabError):
    """The Gaussian weight grows faster than the sampled state decays."""


class SolverDivergedError(HardyLabError):
    """The Crank-Nicolson linear solve failed to reach the residual target."""


class BoundaryMassExceededError(HardyLabError):
    """Too much mass reached the boundary cells for Dirichlet walls to be honest."""
