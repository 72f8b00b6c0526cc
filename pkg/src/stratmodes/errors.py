"""Exception hierarchy shared by all stratmodes modules."""


class StratModesError(Exception):
    """Base class for all library-specific errors."""


class PoleEvaluation(StratModesError):
    """A refractive index was evaluated exactly at a pole of n^2."""


class NotDispersive(StratModesError):
    """Operation requires a Lorentz material but got a constant one."""


class DenominatorZero(StratModesError):
    """The shared denominator N vanished: the frequency is a natural mode."""


class ContourThroughZero(StratModesError):
    """|N| fell below tolerance on an integration contour."""


class MaxDepthExceeded(StratModesError):
    """Subdivision hit the depth limit with cells still unresolved."""

    def __init__(self, message, unresolved_cells=(), partial=None):
        super().__init__(message)
        self.unresolved_cells = list(unresolved_cells)
        self.partial = partial


class DegenerateRatio(StratModesError):
    """Quarter-wave index ratio equal to 1: the polynomial collapses."""


class NoConvergence(StratModesError):
    """An iterative solve did not converge within its iteration budget."""


class EigenvalueHit(StratModesError):
    """Canonical product evaluated too close to (but not at) an eigenvalue."""


class RatioConditionViolated(StratModesError):
    """Eigenvalue tail violates the |lambda_m| ~ m growth condition."""


class TruncationTooSmall(StratModesError):
    """Canonical-product truncation leaves a tail too large to trust."""


class FitUnstable(StratModesError):
    """Decay-exponent fit residual exceeded its threshold."""
