"""Exception hierarchy.

Inconsistent constraint sets are *not* errors: update operators return
:data:`epiupdate.update.BOT` for those. The classes here cover malformed
input, resource limits and numerical breakdowns.
"""


class EpiUpdateError(Exception):
    """Base class for all package errors."""


class DomainError(EpiUpdateError, ValueError):
    """Argument outside the domain of an operation (unknown argument, BAF mismatch...)."""


class ResourceError(EpiUpdateError):
    """Problem exceeds a configured size limit (the world cap)."""


class ParseError(EpiUpdateError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.message = message


class SolverError(EpiUpdateError):
    """The numerical engine stopped without an answer (iteration limit, breakdown)."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SupportError(SolverError):
    """KL projection impossible: constraints need mass on worlds the prior rules out."""


class PreconditionError(EpiUpdateError, ValueError):
    """An operation was called on input violating its precondition (e.g. infeasible polytope)."""
