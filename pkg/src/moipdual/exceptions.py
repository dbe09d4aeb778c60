"""Exception hierarchy shared by every module in the package."""


class MoipError(Exception):
    """Base class for all errors raised by moipdual."""


class PreconditionError(MoipError, ValueError):
    """An input violates a documented precondition."""


class DimensionError(PreconditionError):
    """Objective vectors or matrices have incompatible shapes."""


class UnsupportedDimensionError(PreconditionError):
    """The operation is only implemented for a specific number of objectives."""


class EnumerationCapError(PreconditionError):
    """An integer box is too large to enumerate under the configured cap."""


class InfeasibleError(PreconditionError):
    """The operation needs a feasible instance (or feasible point) and got none."""


class UnboundedError(PreconditionError):
    """An objective is unbounded where a finite value is required."""


class NumericalError(MoipError, ArithmeticError):
    """A solver could not reach a trustworthy answer (cycling guard, tolerance breach)."""


class ParseError(PreconditionError):
    """Malformed instance text. Carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
