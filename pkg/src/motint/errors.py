"""Exception hierarchy shared by all motint modules."""


class MotintError(Exception):
    """Base class for every error raised by the toolkit."""


class MathematicalRejection(MotintError):
    """The input is well-formed but mathematically outside the supported class.

    The CLI maps these onto exit code 2.
    """


class RegionSyntaxError(MotintError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class DimensionMismatch(MotintError, ValueError):
    pass


class InfiniteLattice(MotintError):
    pass


class DivergentSum(MotintError):
    def __init__(self, message, direction=None):
        self.direction = direction
        super().__init__(message)


class NotUnimodular(MotintError, ValueError):
    pass


class PoleAtInfinity(MotintError):
    pass


class BadPrime(MotintError, ValueError):
    pass


class TooLarge(MotintError):
    pass


class Unsupported(MotintError):
    pass


class NotInSpan(MotintError, ValueError):
    pass


class Unbounded(MotintError, ValueError):
    pass


class NotNormalized(MotintError, ValueError):
    pass


class NonIntegralExponent(MotintError, ValueError):
    pass


class NotPolynomial(MotintError, ValueError):
    """A quotient that was expected to be a Laurent polynomial in L is not."""


class OverlappingPieces(MotintError, ValueError):
    pass


class PolySyntaxError(MotintError, ValueError):
    pass


class ConstantTerm(MathematicalRejection, ValueError):
    pass


class NotConvenient(MathematicalRejection):
    def __init__(self, missing):
        self.missing = tuple(missing)
        super().__init__("polynomial is not convenient; no pure power of "
                         + ", ".join(self.missing))


class Degenerate(MathematicalRejection):
    pass


class NondegeneracyUnknown(MathematicalRejection):
    pass


class UnsupportedGeometry(MathematicalRejection):
    """The Newton polyhedron has a tail that does not fuse into coordinate discs."""


class DualPathMismatch(MotintError):
    pass


class MembershipViolation(MotintError):
    def __init__(self, message, point=None):
        self.point = point
        super().__init__(message)
