"""Exception hierarchy shared across the package."""


class LatticeConcatError(Exception):
    """Base class for all errors raised by latticeconcat."""


class NotPrime(LatticeConcatError, ValueError):
    pass


class DivisionByZero(LatticeConcatError, ZeroDivisionError):
    pass


class LengthMismatch(LatticeConcatError, ValueError):
    pass


class RankDeficient(LatticeConcatError, ValueError):
    pass


class TooLarge(LatticeConcatError, ValueError):
    """An enumeration guard was exceeded."""


class NestingViolation(LatticeConcatError):
    pass


class NotLatticePoint(LatticeConcatError, ValueError):
    pass


class PowerViolation(LatticeConcatError, ValueError):
    pass


class DitherOutOfRegion(LatticeConcatError, ValueError):
    pass


class BadParams(LatticeConcatError, ValueError):
    pass


class DecodeFailure(LatticeConcatError):
    """The decoder found no codeword inside its decoding radius."""


class SamplingExhausted(LatticeConcatError, RuntimeError):
    pass


class DimensionBoundViolation(LatticeConcatError, AssertionError):
    pass


class InfeasiblePlan(LatticeConcatError, ValueError):
    pass


class DegenerateCoefficients(LatticeConcatError, ValueError):
    pass


class ConfigError(LatticeConcatError, ValueError):
    """Invalid experiment configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
