"""Error and warning types shared across the package."""


class FramesensError(Exception):
    """Base class for all library-raised errors."""


class SystemFormatError(FramesensError):
    """System file text is malformed or violates the format's invariants."""


class EvaluationOverflow(FramesensError):
    """Evaluation produced a non-finite value.

    Carries ``where``, the offending entry: a ``(row, col)`` pair for matrix
    entries or an integer index for right-hand-side entries.
    """

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class ZeroVector(FramesensError):
    """A vector with zero norm cannot be normalized."""


class DeficiencyZero(FramesensError):
    """The matrix has full rank, so there is no null vector to construct."""


class CofactorOrderLimit(FramesensError):
    """Matrix order exceeds the configured limit for the cofactor path."""


class MinorSelectionError(FramesensError):
    """No pivoting strategy produced a nonsingular minor above tolerance."""


class NotInKernel(FramesensError):
    """Deflation was asked to remove a vector the matrix does not annihilate."""


class DeficiencyChanged(FramesensError):
    """Null-space dimension jumped along a path; smooth tracking stops here.

    ``point_index`` locates the offending path point.
    """

    def __init__(self, message, point_index=None):
        super().__init__(message)
        self.point_index = point_index


class InconsistentSystem(FramesensError):
    """Right-hand side lies outside the matrix column space."""


class SingularAugmented(FramesensError):
    """The bordered solve failed; minor selection needs different pivoting."""


class NotDeficient(FramesensError):
    """Sensitivity of a null direction requires a singular matrix."""


class DeficiencyTooHigh(FramesensError):
    """Null space dimension exceeds one, so the branch derivative is
    underdetermined (k(k-1)/2 free rotation parameters remain).

    Carries ``deficiency``, the computed null-space dimension.
    """

    def __init__(self, deficiency, message=None):
        if message is None:
            free = deficiency * (deficiency - 1) // 2
            message = (
                f"deficiency {deficiency} > 1: the solution-branch derivative "
                f"is underdetermined ({free} free rotation parameters); "
                "provide additional constraints"
            )
        super().__init__(message)
        self.deficiency = deficiency


class InvalidAnchor(FramesensError):
    """Prescribed anchor is not a unit vector in the numerical null space."""


class InconsistentDerivativeSystem(FramesensError):
    """Derivative right-hand side is not orthogonal to the left null space;
    the anchor or the rank diagnosis is suspect."""


class AlignmentAmbiguous(FramesensError):
    """Null direction rotated too far across a finite-difference stencil."""


class GenerationFailed(FramesensError):
    """Random family generation exhausted its resampling budget."""


class ToleranceAmbiguity(UserWarning):
    """A singular value sits within a decade of the rank threshold, so the
    rank decision is fragile."""
