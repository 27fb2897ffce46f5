"""Exception types shared across genuslab."""


class GenusLabError(Exception):
    pass


# maps
class InvalidMap(GenusLabError, ValueError):
    pass


class NotAPermutation(InvalidMap):
    pass


class AlphaFixedPoint(InvalidMap):
    pass


class Disconnected(InvalidMap):
    pass


class NonOrientableInconsistency(InvalidMap):
    pass


class NotATriangulation(InvalidMap):
    pass


class EmptyFaceSet(GenusLabError, ValueError):
    pass


# enumeration
class NonIntegralEntry(GenusLabError, ArithmeticError):
    pass


class NotSeeded(GenusLabError):
    pass


class SizeTooLarge(GenusLabError, ValueError):
    pass


class InconsistentSeed(GenusLabError):
    pass


class TableTooSmall(GenusLabError, ValueError):
    pass


class CorruptTable(GenusLabError):
    pass


# numerics
class DomainError(GenusLabError, ValueError):
    pass


class NoConvergence(GenusLabError, ArithmeticError):
    pass


class QuadratureFailure(GenusLabError, ArithmeticError):
    pass


# sampling
class Exhausted(GenusLabError):
    pass


class EmptyClass(GenusLabError, ValueError):
    pass


# separators / tentacles
class NotAClosedUnion(GenusLabError, ValueError):
    pass


class InvalidEdge(GenusLabError, ValueError):
    pass


class OddChildCount(GenusLabError, ValueError):
    pass


class MalformedWalk(GenusLabError, ValueError):
    pass


class DegenerateTotalCollapse(GenusLabError):
    pass


# cli
class ConfigError(GenusLabError, ValueError):
    pass


class InvariantViolation(GenusLabError):
    pass
