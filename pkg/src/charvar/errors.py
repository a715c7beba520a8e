"""Exception types shared across the package."""


class CharvarError(Exception):
    """Base class for all package errors."""


class DetDrift(CharvarError):
    """A matrix that should lie in SL(2,C) has drifted away from unit determinant."""


class BranchCollision(UserWarning):
    """The two square-root branches of a quadratic coincide."""


class InconsistentFricke(CharvarError):
    """Trace data violates the Fricke relation."""


class ReduciblePair(CharvarError):
    """A pair of matrices shares an eigenvector where an irreducible pair is required."""


class DegenerateTarget(CharvarError):
    """A pair trace lies on the reducible locus {2, t^2 - 2}."""


DegenerateTrace = DegenerateTarget


class TraceMismatch(CharvarError):
    """Two pairs that should be conjugate have different trace data."""


class InvalidFraction(CharvarError):
    """A fraction p/q is not in lowest terms or has zero denominator."""


class ParseError(CharvarError):
    """A tangle specification string could not be parsed."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ExcludedLocus(CharvarError):
    """Chart parameters fall on a locus excluded from the chart."""


class Underdetermined(CharvarError):
    """Propagation could not determine every arc of a diagram."""


class EmptySolutionSet(CharvarError):
    """A Dehn filling equation has no admissible solution."""


class InfiniteSolutionSet(CharvarError):
    """A Dehn filling equation is satisfied for every trace."""


class ChainClosureFailure(CharvarError):
    """The final bridge step of a chain has no solution."""


class AlignmentFailure(CharvarError):
    """A boundary representation could not be conjugated onto its target pair."""


class IllConditioned(CharvarError):
    """Singular values are too close to the rank threshold to decide a rank."""


class UnknownGenerator(CharvarError):
    """A word refers to a generator the representation does not name."""


class UnknownSuite(CharvarError):
    """A verification suite name is not recognized."""
