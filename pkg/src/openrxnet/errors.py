"""Exception hierarchy shared across the library."""


class OpenRxnetError(Exception):
    """Base class for all domain errors raised by this package."""


class BoundaryMismatchError(OpenRxnetError):
    """Two open systems were glued along boundaries that do not match."""


class ApexTooLargeError(OpenRxnetError):
    """Equivalence search would have to enumerate too many bijections."""


class NonlinearFieldError(OpenRxnetError):
    """A linear-only operation received a vector field of degree > 1."""


class NonFiniteStateError(OpenRxnetError):
    """Integration produced a NaN or infinite concentration."""


class DslError(OpenRxnetError):
    """Problem in a network document, with line/column position."""

    def __init__(self, message: str, line: int, column: int = 0):
        super().__init__(f"line {line}: {message}" if column == 0
                         else f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
