"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class SixformError(Exception):
    exit_code = 1


class DimensionMismatch(SixformError, ValueError):
    exit_code = 2


class BackendMismatch(SixformError, TypeError):
    """Exact and float scalars were combined in one operation."""

    exit_code = 3


class BackendFailure(SixformError, ArithmeticError):
    """A floating-point computation left its tolerance envelope."""

    exit_code = 3


class DeltaVerificationError(BackendFailure):
    """An emitted Delta-basis vector failed the defining equation."""


class DegenerateVolume(SixformError, ValueError):
    exit_code = 2


class NotTypeTwo(SixformError):
    exit_code = 4


class NotTypeTwoAtPoint(NotTypeTwo):
    pass


class PurityViolated(SixformError):
    exit_code = 4


class JNotComplexStructure(SixformError, ValueError):
    exit_code = 4


class FormSyntaxError(SixformError, SyntaxError):
    """Parse failure with 1-based line/column."""

    exit_code = 2

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownCoordinate(FormSyntaxError):
    pass


class DegreeMismatch(FormSyntaxError):
    pass


class EvaluationDomain(SixformError, ArithmeticError):
    exit_code = 5


class RankDeficientBasis(SixformError, ValueError):
    exit_code = 6


class NotTypeTwoNearPoint(NotTypeTwo):
    pass


class NegativeSqrtDomain(EvaluationDomain):
    """lambda >= 0 where J = Q / sqrt(-lambda) is needed."""
