"""Exception hierarchy.

Errors fall into two families that the CLI maps to distinct exit codes:
``DataError`` (bad or inconsistent input, exit 2) and ``DegeneracyError``
(well-formed input on which the requested quantity is undefined, exit 3).
"""


class CKAError(Exception):
    """Base class for all package errors."""


class DataError(CKAError, ValueError):
    pass


class DegeneracyError(CKAError, ArithmeticError):
    pass


class NonFiniteInput(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.line = line
        self.path = path


class RowCountMismatch(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class CenteringMismatch(DataError):
    pass


class AlreadyCentered(DataError):
    pass


class EmptyInput(DataError):
    pass


class DegenerateRepresentation(DegeneracyError):
    """All rows coincide, so the median pairwise distance is zero."""


class ZeroSelfSimilarity(DegeneracyError):
    pass


class ZeroLinearCKA(DegeneracyError):
    pass


class InsufficientTail(DegeneracyError):
    pass
