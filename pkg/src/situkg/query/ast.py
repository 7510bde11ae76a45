"""Syntax tree for the supported SELECT subset."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from situkg.terms import Term


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


PatternTerm = Union[Term, Var]


@dataclass(frozen=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def variables(self) -> list[str]:
        return [t.name for t in (self.subject, self.predicate, self.object) if isinstance(t, Var)]


@dataclass(frozen=True)
class GroupPattern:
    elements: tuple = ()

    def triple_patterns(self) -> list[TriplePattern]:
        return [e for e in self.elements if isinstance(e, TriplePattern)]

    def variables(self) -> list[str]:
        """Variables a solution of this group can bind, in first-seen order.

        Variables that only occur inside FILTER or NOT EXISTS are excluded.
        """
        seen: dict[str, None] = {}
        for e in self.elements:
            if isinstance(e, TriplePattern):
                for v in e.variables():
                    seen.setdefault(v)
            elif isinstance(e, OptionalPattern):
                for v in e.group.variables():
                    seen.setdefault(v)
        return list(seen)


@dataclass(frozen=True)
class OptionalPattern:
    group: GroupPattern


@dataclass(frozen=True)
class Filter:
    expr: "Expr"


@dataclass(frozen=True)
class NotExists:
    group: GroupPattern


# expressions


@dataclass(frozen=True)
class Comparison:
    op: str  # one of = != < <= > >=
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str  # upper-cased function name
    args: tuple


Expr = Union[Comparison, And, Call, Var, Term]


@dataclass(frozen=True)
class Count:
    var: Optional[Var]  # None means COUNT(*)
    distinct: bool = False


@dataclass(frozen=True)
class Aggregate:
    function: Count
    alias: Var


Projection = Union[Var, Aggregate]


@dataclass(frozen=True)
class OrderKey:
    expr: Expr
    descending: bool = False


@dataclass(frozen=True)
class SelectQuery:
    projection: Optional[tuple]  # None for SELECT *
    where: GroupPattern
    distinct: bool = False
    group_by: tuple = ()
    order_by: tuple = ()

    @property
    def aggregates(self) -> list[Aggregate]:
        return [p for p in self.projection or () if isinstance(p, Aggregate)]

    def output_variables(self) -> list[str]:
        if self.projection is None:
            return self.where.variables()
        return [p.name if isinstance(p, Var) else p.alias.name for p in self.projection]


QueryAst = SelectQuery
