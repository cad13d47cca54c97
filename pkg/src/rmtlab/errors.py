"""Exception hierarchy for rmtlab.

Every error raised on purpose by the library derives from :class:`RmtLabError`,
so callers running long Monte Carlo batches can catch one type.
"""

from __future__ import annotations


class RmtLabError(Exception):
    """Base class for all library errors."""


# -- input validation ------------------------------------------------------


class NonFinite(RmtLabError, ValueError):
    """Matrix or vector contains NaN or Inf."""


class InvalidDimension(RmtLabError, ValueError):
    pass


class DimensionMismatch(RmtLabError, ValueError):
    pass


class InvalidArgument(RmtLabError, ValueError):
    pass


class NegativeArgument(InvalidArgument):
    pass


# -- linear algebra --------------------------------------------------------


class IllConditionedBasis(RmtLabError, ArithmeticError):
    """Eigenvector matrix too ill-conditioned to be trusted (matrix is
    numerically non-diagonalizable)."""

    def __init__(self, condition: float, limit: float):
        self.condition = condition
        self.limit = limit
        super().__init__(
            f"eigenvector basis condition number {condition:.3e} exceeds {limit:.1e}"
        )


class PoleProximity(RmtLabError, ArithmeticError):
    """Evaluation point is numerically on a pole of a resolvent."""


class BiorthogonalityViolated(RmtLabError, ValueError):
    pass


# -- models ----------------------------------------------------------------


class KindMismatch(RmtLabError, ValueError):
    """Base matrix or operation incompatible with the model kind."""


class TOutOfRange(RmtLabError, ValueError):
    pass


class DegenerateT(RmtLabError, ValueError):
    pass


class RegimeViolation(RmtLabError, ValueError):
    pass


class OnSupport(RmtLabError, ValueError):
    """Stieltjes transform requested on the support [-2, 2]."""


class NonOrthonormal(RmtLabError, ValueError):
    pass


# -- trajectories ----------------------------------------------------------


class CardinalityMismatch(RmtLabError, ValueError):
    pass


class RefinementExhausted(RmtLabError, ArithmeticError):
    def __init__(self, t_left: float, t_right: float, depth: int):
        self.t_left = t_left
        self.t_right = t_right
        self.depth = depth
        super().__init__(
            f"could not resolve eigenvalue matching on [{t_left!r}, {t_right!r}] "
            f"after {depth} bisections (near-collision)"
        )


class GapTooSmall(RmtLabError, ArithmeticError):
    pass


class CollisionAbort(RmtLabError, ArithmeticError):
    def __init__(self, t: float, pair: tuple[int, int], gap: float):
        self.t = t
        self.pair = pair
        self.gap = gap
        super().__init__(f"paths {pair[0]} and {pair[1]} within {gap:.3e} at t={t!r}")


# -- outlier analysis ------------------------------------------------------


class OverlappingDomains(RmtLabError, ValueError):
    pass


class DegenerateCoupling(RmtLabError, ValueError):
    pass


# -- gaf -------------------------------------------------------------------


class InvalidTruncation(RmtLabError, ValueError):
    pass


class TruncationTooSmall(RmtLabError, ValueError):
    pass


class DegenerateInput(RmtLabError, ValueError):
    pass


class CountMismatch(RmtLabError, ArithmeticError):
    def __init__(self, roots: int, winding: int):
        self.roots = roots
        self.winding = winding
        super().__init__(f"root finder found {roots} zeros, argument principle {winding}")


class InsufficientTrials(RmtLabError, ValueError):
    pass


# -- lab -------------------------------------------------------------------


class InvalidConfig(RmtLabError, ValueError):
    pass


class IoFailure(RmtLabError, OSError):
    def __init__(self, path, reason: str):
        self.path = path
        super().__init__(f"{path}: {reason}")
