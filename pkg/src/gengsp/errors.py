"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes): ``UsageError`` for
inputs that are malformed or inconsistent, and ``NumericalError`` for
well-formed inputs on which a numerical procedure cannot succeed.
"""


class GenGSPError(Exception):
    """Base class for every error raised by this package."""


class UsageError(GenGSPError, ValueError):
    pass


class NumericalError(GenGSPError, ArithmeticError):
    pass


class NotSymmetric(UsageError):
    pass


class DimensionMismatch(UsageError):
    pass


class OutOfDomain(UsageError):
    pass


class BasisMismatch(UsageError):
    pass


class ContextMismatch(UsageError):
    pass


class CutoffOutOfRange(UsageError):
    pass


class NotRepresentable(UsageError):
    pass


class UnboundedFreqLabel(NumericalError):
    """Polynomial filter asked to use lambda_xi = 1/0."""


class DependentColumns(NumericalError):
    pass


class InfeasiblePartition(NumericalError):
    pass


class QuadratureUnderResolved(NumericalError):
    pass


class RankDeficient(NumericalError):
    pass


class PlanFailed(NumericalError):
    pass


class DegenerateFactorization(NumericalError):
    pass
