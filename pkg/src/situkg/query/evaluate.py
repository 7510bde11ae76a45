"""Evaluation of parsed queries against a :class:`~situkg.graph.Graph`."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Iterator, Optional

from situkg.errors import QueryEvaluationError
from situkg.graph import Graph
from situkg.query.ast import (
    Aggregate,
    And,
    Call,
    Comparison,
    Filter,
    GroupPattern,
    NotExists,
    OptionalPattern,
    SelectQuery,
    TriplePattern,
    Var,
)
from situkg.terms import (
    RDF_LANGSTRING,
    XSD,
    XSD_BOOLEAN,
    XSD_INTEGER,
    XSD_STRING,
    Literal,
    Term,
    compare_terms,
    date_value,
    numeric_value,
    parse_date,
)

Binding = dict[str, Term]


@dataclass
class SolutionSequence:
    variables: list[str]
    rows: list[Binding] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[Binding]:
        return iter(self.rows)

    def __getitem__(self, i: int) -> Binding:
        return self.rows[i]

    def tuples(self) -> list[tuple[Optional[Term], ...]]:
        return [tuple(row.get(v) for v in self.variables) for row in self.rows]

    def column(self, var: str) -> list[Optional[Term]]:
        return [row.get(var) for row in self.rows]


class _ExprError(Exception):
    """Type error inside an expression; the enclosing FILTER is false."""


def evaluate(graph: Graph, query: SelectQuery) -> SolutionSequence:
    where_vars = set(query.where.variables())
    aliases: set[str] = set()
    for agg in query.aggregates:
        name = agg.alias.name
        if name in where_vars or name in aliases:
            raise QueryEvaluationError(f"aggregate alias ?{name} is already bound")
        aliases.add(name)

    rows = _eval_group(graph, query.where, {})

    if query.aggregates or query.group_by:
        rows = _aggregate(rows, query)

    if query.order_by:
        rows = sorted(rows, key=cmp_to_key(_order_cmp(query)))

    variables = query.output_variables()
    projected = [{v: row[v] for v in variables if v in row} for row in rows]

    if query.distinct:
        seen: set = set()
        unique = []
        for row in projected:
            key = tuple(row.get(v) for v in variables)
            if key not in seen:
                seen.add(key)
                unique.append(row)
        projected = unique
    return SolutionSequence(variables, projected)


# -- patterns ----------------------------------------------------------------


def _eval_group(graph: Graph, group: GroupPattern, seed: Binding) -> list[Binding]:
    rows: list[Binding] = [dict(seed)]
    block: list[TriplePattern] = []
    tests: list = []
    for element in group.elements:
        if isinstance(element, TriplePattern):
            block.append(element)
            continue
        if block:
            rows = _join_block(graph, rows, block)
            block = []
        if isinstance(element, OptionalPattern):
            extended: list[Binding] = []
            for row in rows:
                found = _eval_group(graph, element.group, row)
                extended.extend(found or [row])
            rows = extended
        else:
            tests.append(element)
    if block:
        rows = _join_block(graph, rows, block)
    for test in tests:
        if isinstance(test, NotExists):
            rows = [r for r in rows if not _eval_group(graph, test.group, r)]
        else:
            rows = [r for r in rows if _filter_holds(test, r)]
    return rows


def _plan(block: list[TriplePattern], bound: set[str]) -> list[TriplePattern]:
    """Greedy order: most bound positions first, ties in written order."""
    remaining = list(block)
    bound = set(bound)
    order = []
    while remaining:
        def score(p: TriplePattern) -> int:
            return sum(not isinstance(t, Var) or t.name in bound for t in (p.subject, p.predicate, p.object))
        best = max(remaining, key=score)
        remaining.remove(best)
        order.append(best)
        bound.update(best.variables())
    return order


def _join_block(graph: Graph, rows: list[Binding], block: list[TriplePattern]) -> list[Binding]:
    if not rows:
        return []
    bound = set(rows[0])
    for row in rows[1:]:
        bound &= row.keys()
    for pattern in _plan(block, bound):
        joined: list[Binding] = []
        for row in rows:
            s, p, o = (row.get(t.name) if isinstance(t, Var) else t
                       for t in (pattern.subject, pattern.predicate, pattern.object))
            for triple in graph.match(s, p, o):
                ext = _extend(row, pattern, triple)
                if ext is not None:
                    joined.append(ext)
        rows = joined
        if not rows:
            break
    return rows


def _extend(row: Binding, pattern: TriplePattern, triple) -> Optional[Binding]:
    out = dict(row)
    for slot, value in zip((pattern.subject, pattern.predicate, pattern.object), triple):
        if isinstance(slot, Var):
            current = out.get(slot.name)
            if current is None:
                out[slot.name] = value
            elif current != value:
                return None
    return out


# -- expressions -------------------------------------------------------------


def _filter_holds(f: Filter, row: Binding) -> bool:
    try:
        return _ebv(_eval_expr(f.expr, row))
    except _ExprError:
        return False


def _eval_expr(expr, row: Binding) -> Term:
    if isinstance(expr, Var):
        if expr.name not in row:
            raise _ExprError(f"?{expr.name} is unbound")
        return row[expr.name]
    if isinstance(expr, Comparison):
        left = _eval_expr(expr.left, row)
        right = _eval_expr(expr.right, row)
        return _bool(_compare(expr.op, left, right))
    if isinstance(expr, And):
        # error && false is false, as in SPARQL's three-valued logic
        results = []
        for side in (expr.left, expr.right):
            try:
                results.append(_ebv(_eval_expr(side, row)))
            except _ExprError:
                results.append(None)
        if False in results:
            return _bool(False)
        if None in results:
            raise _ExprError("error in conjunction")
        return _bool(True)
    if isinstance(expr, Call):
        return _call(expr, row)
    return expr


def _call(expr: Call, row: Binding) -> Term:
    if expr.name == "YEAR":
        arg = _eval_expr(expr.args[0], row)
        day = date_value(arg)
        if day is None and isinstance(arg, Literal) and arg.datatype == XSD + "dateTime":
            day = parse_date(arg.lexical[:10])
        if day is None:
            raise _ExprError("YEAR needs a date")
        return Literal(str(day.year), XSD_INTEGER)
    raise _ExprError(f"unknown function {expr.name}")


def _bool(value: bool) -> Literal:
    return Literal("true" if value else "false", XSD_BOOLEAN)


def _ebv(term: Term) -> bool:
    if isinstance(term, Literal):
        if term.datatype == XSD_BOOLEAN:
            if term.lexical in ("true", "1"):
                return True
            if term.lexical in ("false", "0"):
                return False
            raise _ExprError("malformed boolean")
        number = numeric_value(term)
        if number is not None:
            return number != 0
        if term.datatype in (XSD_STRING, RDF_LANGSTRING):
            return term.lexical != ""
    raise _ExprError("no effective boolean value")


def _compare(op: str, a: Term, b: Term) -> bool:
    ordered = _ordered_pair(a, b)
    if ordered is None:
        if op == "=":
            return a == b
        if op == "!=":
            return a != b
        raise _ExprError("incomparable terms")
    x, y = ordered
    return {
        "=": x == y, "!=": x != y, "<": x < y, "<=": x <= y, ">": x > y, ">=": x >= y,
    }[op]


def _ordered_pair(a: Term, b: Term):
    na, nb = numeric_value(a), numeric_value(b)
    if na is not None and nb is not None:
        return na, nb
    da, db = date_value(a), date_value(b)
    if da is not None and db is not None:
        return da, db
    if (isinstance(a, Literal) and isinstance(b, Literal) and a.datatype == b.datatype
            and a.datatype in (XSD_STRING, RDF_LANGSTRING) and a.language == b.language):
        return a.lexical, b.lexical
    return None


# -- grouping and ordering ---------------------------------------------------


def _aggregate(rows: list[Binding], query: SelectQuery) -> list[Binding]:
    keys = [v.name for v in query.group_by]
    partitions: dict[tuple, list[Binding]] = {}
    if not keys:
        partitions[()] = rows
    for row in rows if keys else ():
        partitions.setdefault(tuple(row.get(k) for k in keys), []).append(row)

    out = []
    for key, members in partitions.items():
        result: Binding = {k: v for k, v in zip(keys, key) if v is not None}
        for agg in query.aggregates:
            result[agg.alias.name] = _count(agg, members)
        out.append(result)
    return out


def _count(agg: Aggregate, members: list[Binding]) -> Literal:
    func = agg.function
    if func.var is None:
        values = [tuple(sorted(r.items(), key=lambda kv: kv[0])) for r in members]
    else:
        values = [r[func.var.name] for r in members if func.var.name in r]
    n = len(set(values)) if func.distinct else len(values)
    return Literal(str(n), XSD_INTEGER)


def _order_cmp(query: SelectQuery):
    keys = query.order_by

    def value(expr, row):
        try:
            return _eval_expr(expr, row)
        except _ExprError:
            return None

    def cmp(r1: Binding, r2: Binding) -> int:
        for key in keys:
            a, b = value(key.expr, r1), value(key.expr, r2)
            if a is None and b is None:
                c = 0
            elif a is None:
                c = -1
            elif b is None:
                c = 1
            else:
                c = compare_terms(a, b)
            if c:
                return -c if key.descending else c
        return 0

    return cmp
