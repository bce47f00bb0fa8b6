"""Exception hierarchy shared by all qdiv modules."""


class QdivError(Exception):
    """Base class for every error raised by qdiv."""


class DomainError(QdivError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class NotPositiveDefinite(DomainError):
    pass


class DimensionMismatch(QdivError, ValueError):
    pass


class DimensionError(DimensionMismatch):
    """Target dimension is too small for a block embedding."""


class TraceBudgetError(DomainError):
    """Unit-trace padding requested with T <= Tr(X)."""


class EigFailure(QdivError, ArithmeticError):
    """The Jacobi eigensolver did not converge within ``max_sweeps``."""


class QuadratureFailure(QdivError, ArithmeticError):
    pass


class NumericalInconsistency(QdivError, ArithmeticError):
    """A quantity that is provably nonnegative came out clearly negative."""


class InvalidGenerator(QdivError, ValueError):
    pass


class InvalidKernel(QdivError, ValueError):
    pass


class CoeffSumNonzero(QdivError, ValueError):
    pass


class NotCnd(QdivError, ValueError):
    pass


class CertifyOverflow(QdivError, OverflowError):
    pass


class DivisionByIntervalContainingZero(QdivError, ZeroDivisionError):
    pass


class ParseError(QdivError, ValueError):
    """Malformed JSON input (matrix, kernel, generator or certificate files)."""
