"""Exception hierarchy shared by every situkg module."""

from __future__ import annotations

from dataclasses import dataclass


class SitukgError(Exception):
    pass


class StructuralError(SitukgError, ValueError):
    """A term or triple violates its structural invariants."""


class UnknownPrefixError(SitukgError, KeyError):
    def __init__(self, prefix: str):
        super().__init__(prefix)
        self.prefix = prefix

    def __str__(self) -> str:
        return f"undeclared prefix {self.prefix!r}"


@dataclass(frozen=True)
class ParseError:
    """One positioned syntax problem. Lines and columns are 1-based."""

    line: int
    column: int
    message: str
    token: str = ""

    def __str__(self) -> str:
        where = f"{self.line}:{self.column}"
        if self.token:
            return f"{where}: {self.message} (at {self.token!r})"
        return f"{where}: {self.message}"


class TurtleSyntaxError(SitukgError):
    def __init__(self, errors: list[ParseError]):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors))


class QuerySyntaxError(SitukgError):
    def __init__(self, message: str, line: int = 0, column: int = 0, token: str = ""):
        self.error = ParseError(line, column, message, token)
        super().__init__(str(self.error))


class QueryEvaluationError(SitukgError):
    pass


class MissingParameterError(SitukgError, KeyError):
    def __init__(self, slot: str):
        super().__init__(slot)
        self.slot = slot

    def __str__(self) -> str:
        return f"no value supplied for template slot {{{{{self.slot}}}}}"


class LabelInjectionError(SitukgError, ValueError):
    """A label would break out of the quoted slot of the explanation query."""


class EventError(SitukgError, ValueError):
    """An annotation event failed validation.

    ``lines`` holds the 1-based input line numbers at fault, when known.
    """

    def __init__(self, message: str, lines: tuple[int, ...] = ()):
        super().__init__(message)
        self.lines = tuple(lines)


class ConflictError(SitukgError, ValueError):
    """Two events disagree about a node that must be single-valued."""

    def __init__(self, node: str, message: str):
        super().__init__(f"{node}: {message}")
        self.node = node
