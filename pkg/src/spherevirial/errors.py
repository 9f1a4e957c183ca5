"""Exception hierarchy shared by all modules."""


class SphereVirialError(Exception):
    """Base class for every error raised by the package."""


class DomainError(SphereVirialError, ValueError):
    """Input lies outside the region covered by the gnomonic chart."""


class SpecError(SphereVirialError, ValueError):
    """A system specification violates its preconditions."""


class ResonanceError(SphereVirialError, ArithmeticError):
    """The coefficient a recurrence must divide by vanishes.

    Attributes
    ----------
    gamma, k : int
        Perturbation order and moment index of the moment being solved for.
    kind : str
        ``"curvature"`` for the oscillator relation, ``"angular"`` for the
        Coulomb relation.
    """

    def __init__(self, message, *, gamma=None, k=None, kind="curvature", m=None):
        super().__init__(message)
        self.gamma = gamma
        self.k = k
        self.kind = kind
        self.m = m


class TruncationError(SphereVirialError, ArithmeticError):
    """A jet has run out of Taylor orders for a requested derivative."""


class UnreachableMomentError(SphereVirialError, ValueError):
    """A moment needed by the dependency walk cannot be produced from the seed."""

    def __init__(self, message, *, gamma=None, k=None):
        super().__init__(message)
        self.gamma = gamma
        self.k = k


class GridResolutionError(SphereVirialError, ValueError):
    """Grid too coarse for the requested eigenstate."""


class ConvergenceError(SphereVirialError, ArithmeticError):
    """Iterative eigen-solver did not reach its residual target."""


class DivergentMomentError(SphereVirialError, ValueError):
    """Requested expectation value does not exist for this eigenstate."""


class ChartBoundaryError(SphereVirialError, RuntimeError):
    """Classical orbit left the open hemisphere covered by the chart."""


class PeriodNotFoundError(SphereVirialError, RuntimeError):
    """No period was detected inside the integration window.

    Attributes
    ----------
    best_guess : float or None
        Rough period estimate from the sampled trajectory, if any.
    """

    def __init__(self, message, best_guess=None):
        super().__init__(message)
        self.best_guess = best_guess


class ConfigError(SphereVirialError, ValueError):
    """Run configuration rejected during validation."""
