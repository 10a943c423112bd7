"""Exception hierarchy shared by every qsteer module."""


class QSteerError(Exception):
    """Base class for all qsteer failures."""


class NumericalIntegrityError(QSteerError, ArithmeticError):
    """A computed quantity broke an invariant it must satisfy up to roundoff."""


class UnsupportedInputError(QSteerError, ValueError):
    """The input is valid but lies outside what the operation supports."""


class IdentityViolationError(QSteerError, AssertionError):
    """An exact algebraic identity failed beyond tolerance (implementation bug)."""


class StateFileError(QSteerError, ValueError):
    """A state or coefficient file could not be parsed."""

    def __init__(self, message, field=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.field = field
        self.line = line
