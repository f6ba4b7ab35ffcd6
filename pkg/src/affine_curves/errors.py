"""Exception types raised by the toolkit."""


class AffineCurveError(Exception):
    """Base class for all toolkit errors."""


class GridTooShort(AffineCurveError, ValueError):
    pass


class NonUniformGrid(AffineCurveError, ValueError):
    pass


class DegenerateCurve(AffineCurveError, ValueError):
    """det(c', c'', c''') is not positive at some sample.

    The curve is locally planar there, or its orientation is reversed.
    """

    def __init__(self, index: int, value: float | None = None):
        self.index = int(index)
        self.value = value
        msg = f"nondegeneracy condition det(c',c'',c''') > 0 violated at sample {self.index}"
        if value is not None:
            msg += f" (det = {value:.6g})"
        super().__init__(msg)


class NonPositiveMass(AffineCurveError, ValueError):
    pass


class Overflow(AffineCurveError, OverflowError):
    pass


class EmptyOverlap(AffineCurveError, ValueError):
    pass


class BadInitialFrame(AffineCurveError, ValueError):
    pass


class InvalidMap(AffineCurveError, ValueError):
    pass


class RandomRejectionExhausted(AffineCurveError, RuntimeError):
    pass


class ClosedFormMismatch(AffineCurveError, ArithmeticError):
    """The exponential path disagrees with a closed-form canonical curve."""


class ParseError(AffineCurveError, ValueError):
    """Malformed CSV or JSON input."""
