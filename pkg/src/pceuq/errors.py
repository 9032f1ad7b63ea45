"""Exception hierarchy shared by all modules."""


class PceUqError(Exception):
    """Base class for every error raised by pceuq."""


class InputError(PceUqError, ValueError):
    """Bad user input (shape, range, schema). Maps to CLI exit code 2."""


class NumericalError(PceUqError, ArithmeticError):
    """A numerical procedure failed. Maps to CLI exit code 3."""


# marginals
class DegenerateSample(InputError):
    pass


class OutOfRange(InputError):
    pass


# orthopoly
class InvalidInterval(InputError):
    pass


class QuadratureFailure(NumericalError):
    pass


# basis
class SizeOverflow(InputError):
    pass


class DegreeMismatch(InputError):
    pass


# regression
class RankDeficient(NumericalError):
    pass


class NumericalBreakdown(NumericalError):
    pass


class LeverageOne(NumericalError):
    pass


class NoFeasibleModel(NumericalError):
    pass


# copula
class ParamOutOfRange(InputError):
    pass


class UnsupportedFamily(InputError):
    pass


class ConvergenceFailure(NumericalError):
    pass


class FitFailure(NumericalError):
    pass


# pce
class InsufficientData(InputError):
    pass


class MissingCopula(InputError):
    pass


class DimensionUnsupported(InputError):
    pass


# metrics
class LengthMismatch(InputError):
    pass


class ZeroReference(InputError):
    pass


class GridTooCoarse(InputError):
    pass


# benchmarks / cli
class SingularStiffness(NumericalError):
    pass


class UnknownBenchmark(InputError):
    pass


class SchemaMismatch(InputError):
    pass
