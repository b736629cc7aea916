"""Exception types shared across the package."""


class GridMismatchError(ValueError):
    """Arrays or grids that should be compatible are not (lengths, spacing, hbar)."""


class DomainError(ValueError):
    """A parameter is outside the operation's domain (n=0, empty mixture, ...)."""


class ResolutionError(ValueError):
    """The grid cannot resolve the requested feature (epsilon < 2*dx, basis order too high)."""


class ConstructionError(RuntimeError):
    """A constructive procedure failed (profile realization, root bracketing)."""


class NearResonanceError(RuntimeError):
    """Linear system is singular or near-singular at the requested energy."""

    def __init__(self, message, condition_estimate=None):
        super().__init__(message)
        self.condition_estimate = condition_estimate


class ReconstructionError(ValueError):
    """Input data does not cover enough of the domain to reconstruct the field."""


class NonlocalityError(ValueError):
    """Supplied potential window is too small; the required span is reported."""


class InsufficientBasisError(RuntimeError):
    """Requested tail tolerance not reachable within the available basis size."""

    def __init__(self, message, achieved_tail=None):
        super().__init__(message)
        self.achieved_tail = achieved_tail
