"""Exception hierarchy shared by all ultrascale modules."""


class UltrascaleError(Exception):
    """Base class for all errors raised by this package."""


class OutOfRangeParam(UltrascaleError):
    """A family or weight-function parameter is outside its admissible range."""


class TruncationTooSmall(UltrascaleError):
    """The truncation index K is too small for the requested check."""


class NonNormalized(UltrascaleError):
    """A sequence does not satisfy log_terms[0] == 0."""


class LengthMismatch(UltrascaleError):
    """Two sequences were expected to share the same truncation."""


class IndexOutOfRange(UltrascaleError):
    """An index combination exceeds the stored truncation."""


class PreconditionViolated(UltrascaleError):
    """A documented operation precondition does not hold for the inputs."""


class HGridInsufficient(UltrascaleError):
    """The h-grid of the interpolation construction did not stabilise."""


class OrderViolation(UltrascaleError):
    """A family of sequences is not totally ordered on the supplied grid."""


class NonMonotoneTable(UltrascaleError):
    """A tabulated weight function is not increasing."""


class ArgmaxAtBoundary(UltrascaleError):
    """The inner maximiser of a conjugate hit the search boundary."""


class SupDiverges(UltrascaleError):
    """The defining supremum of an associated weight function is infinite."""


class GridTooCoarse(UltrascaleError):
    """An evaluation grid is too coarse for the requested accuracy."""


class AxiomViolation(UltrascaleError):
    """A generating function violates one of its defining axioms."""


class GridMismatch(UltrascaleError):
    """Two parameter grids were expected to have equal length."""


class DeltaOutOfRange(UltrascaleError):
    """A subellipticity loss index is outside [0, 1)."""


class OddVanishingOrder(UltrascaleError):
    """A vanishing order must be an even positive integer."""


class MissingSupportObject(UltrascaleError):
    """A loss-map variant needs a support object that was not supplied."""


class HypothesisNotMet(UltrascaleError):
    """A verified statement's hypotheses fail for the supplied inputs."""


class ZeroPrincipalPart(UltrascaleError):
    """A symbol has no nonzero top-order coefficient."""


class EmptyField(UltrascaleError):
    """A grid field is identically zero."""


class DegenerateData(UltrascaleError):
    """Measured data carries no usable growth information."""


class EpsilonOutOfRange(UltrascaleError):
    """The localisation exponent violates its admissible bound."""


class QuadratureNotConverged(UltrascaleError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class WindowTooNarrow(UltrascaleError):
    """An integration window excludes a non-negligible tail mass."""


class OffGridPartner(UltrascaleError):
    """An existential partner falls outside the sampled parameter grid."""


class ParseError(UltrascaleError):
    """A job configuration failed to parse or validate."""

    def __init__(self, message, location=None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.location = location


class UnknownTaskKind(UltrascaleError):
    """A job configuration names a task kind that does not exist."""
