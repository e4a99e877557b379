"""Exception hierarchy shared by all modules."""


class RGError(Exception):
    """Base class for every error raised by this package."""


class DimensionTooLarge(RGError):
    """Matrix dimension exceeds the cost guard of an exponential kernel."""


class NonFiniteEntry(RGError):
    """A float-mode value is NaN/Inf on entry, or a kernel overflowed to one."""


class PoleAtEvaluationPoint(RGError):
    """A rapidity coincides with an inhomogeneity, so the expression has a pole."""


class CardinalityMismatch(RGError):
    """Sequence lengths are inconsistent with the spin content of the system."""


class InsufficientDerivatives(RGError):
    """The derivative table is too short for the requested hierarchy order."""


class DegenerateEpsilons(RGError):
    """Two inhomogeneities coincide; all constructions here require them distinct."""


class CostGuard(RGError):
    """Refused: the requested exponential-cost computation exceeds the size guard."""


class NoConvergence(RGError):
    """Newton/homotopy continuation failed to reach the target coupling.

    The coupling reached before giving up is stored in ``g_reached``.
    """

    def __init__(self, message: str, g_reached: float | None = None):
        super().__init__(message)
        self.g_reached = g_reached
