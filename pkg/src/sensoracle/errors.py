"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class OracleError(Exception):
    """Base class for all errors raised by sensoracle."""


class ConfigurationError(OracleError, ValueError):
    """Field or run configuration cannot serve the requested computation."""


class CapacityError(ConfigurationError):
    """Instance is too large for the available field (size or two-adicity)."""


class InvariantError(OracleError, ArithmeticError):
    """An algebraic invariant that must hold exactly was violated."""


class DivisibilityError(InvariantError):
    """An exact polynomial division left a non-zero remainder."""


class RankDegeneracyError(InvariantError):
    """A kernel basis had the wrong dimension (input lacks full row rank)."""


class SingularMatrixError(OracleError):
    """A matrix that must be non-singular has zero determinant."""


class SingularUpdateError(SingularMatrixError):
    """The matrix became singular after applying an update batch."""


class RetryWithNewSeed(SingularMatrixError):
    """Random graph encoding degenerated; rebuild with a different seed."""


class ParseError(OracleError, ValueError):
    """Malformed or semantically invalid input file."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
