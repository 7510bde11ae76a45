"""Recursive-descent parser for the SELECT subset."""

from __future__ import annotations

from typing import Optional

from situkg.errors import QuerySyntaxError, StructuralError
from situkg.lexer import Lexer, Token, unescape_iri, unescape_string
from situkg.query.ast import (
    Aggregate,
    And,
    Call,
    Comparison,
    Count,
    Filter,
    GroupPattern,
    NotExists,
    OptionalPattern,
    OrderKey,
    SelectQuery,
    TriplePattern,
    Var,
)
from situkg.terms import (
    RDF_LANGSTRING,
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    Iri,
    Literal,
    default_prefixes,
)

FUNCTIONS = {"YEAR": 1}
_NUMBERS = {"INTEGER": XSD_INTEGER, "DECIMAL": XSD_DECIMAL, "DOUBLE": XSD_DOUBLE}
_COMPARATORS = {"=", "!=", "<", "<=", ">", ">="}


class _QueryParser:
    def __init__(self, text: str, prefixes: Optional[dict]):
        tokens, errors = Lexer(text).tokens()
        if errors:
            e = errors[0]
            raise QuerySyntaxError(e.message, e.line, e.column, e.token)
        for t in tokens:
            if t.kind == "TEMPLATE":
                raise QuerySyntaxError("unsubstituted template slot", t.line, t.column, t.text)
        self.tokens = tokens
        self.pos = 0
        self.prefixes = default_prefixes()
        self.prefixes.update(prefixes or {})

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def fail(self, message: str, t: Optional[Token] = None):
        t = t or self.tok
        raise QuerySyntaxError(message, t.line, t.column, t.text)

    def expect_punct(self, ch: str) -> Token:
        if not self.tok.is_("PUNCT", ch):
            self.fail(f"expected '{ch}'")
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        if not self.tok.keyword(word):
            self.fail(f"expected {word}")
        return self.advance()

    # query

    def query(self) -> SelectQuery:
        while self.tok.keyword("PREFIX") or self.tok.keyword("BASE"):
            if self.advance().text.upper() == "BASE":
                self.fail("BASE is not supported")
            name = self.tok
            if name.kind != "PNAME" or not name.text.endswith(":"):
                self.fail("expected prefix name ending in ':'")
            self.advance()
            if self.tok.kind != "IRIREF":
                self.fail("expected namespace IRI")
            self.prefixes[name.text[:-1]] = unescape_iri(self.advance().text[1:-1], name)

        self.expect_keyword("SELECT")
        distinct = False
        if self.tok.keyword("DISTINCT") or self.tok.keyword("REDUCED"):
            distinct = self.advance().text.upper() == "DISTINCT"
        projection = self.projection()
        if self.tok.keyword("WHERE"):
            self.advance()
        if not self.tok.is_("PUNCT", "{"):
            self.fail("expected '{' to open the WHERE clause")
        where = self.group()

        group_by: list[Var] = []
        if self.tok.keyword("GROUP"):
            self.advance()
            self.expect_keyword("BY")
            while self.tok.kind == "VAR":
                group_by.append(Var(self.advance().text[1:]))
            if not group_by:
                self.fail("expected variable after GROUP BY")

        order_by: list[OrderKey] = []
        if self.tok.keyword("ORDER"):
            self.advance()
            self.expect_keyword("BY")
            while True:
                if self.tok.keyword("ASC") or self.tok.keyword("DESC"):
                    desc = self.advance().text.upper() == "DESC"
                    self.expect_punct("(")
                    expr = self.expression()
                    self.expect_punct(")")
                    order_by.append(OrderKey(expr, desc))
                elif self.tok.kind == "VAR":
                    order_by.append(OrderKey(Var(self.advance().text[1:])))
                else:
                    break
            if not order_by:
                self.fail("expected sort key after ORDER BY")

        if self.tok.kind != "EOF":
            self.fail("unexpected trailing input")
        q = SelectQuery(projection, where, distinct, tuple(group_by), tuple(order_by))
        self.check_scope(q)
        return q

    def projection(self) -> Optional[tuple]:
        if self.tok.is_("PUNCT", "*"):
            self.advance()
            return None
        items: list = []
        while True:
            t = self.tok
            if t.kind == "VAR":
                items.append(Var(self.advance().text[1:]))
            elif t.is_("PUNCT", "("):
                self.advance()
                func = self.aggregate()
                self.expect_keyword("AS")
                if self.tok.kind != "VAR":
                    self.fail("expected variable after AS")
                items.append(Aggregate(func, Var(self.advance().text[1:])))
                self.expect_punct(")")
            else:
                break
        if not items:
            self.fail("expected projection variables or '*'")
        return tuple(items)

    def aggregate(self) -> Count:
        t = self.tok
        if not t.keyword("COUNT"):
            if t.kind == "NAME":
                self.fail(f"unknown aggregate {t.text}")
            self.fail("expected aggregate")
        self.advance()
        self.expect_punct("(")
        distinct = False
        if self.tok.keyword("DISTINCT"):
            self.advance()
            distinct = True
        if self.tok.is_("PUNCT", "*"):
            self.advance()
            var = None
        elif self.tok.kind == "VAR":
            var = Var(self.advance().text[1:])
        else:
            self.fail("expected variable or '*' in COUNT")
        self.expect_punct(")")
        return Count(var, distinct)

    # patterns

    def group(self) -> GroupPattern:
        self.expect_punct("{")
        elements: list = []
        while not self.tok.is_("PUNCT", "}"):
            t = self.tok
            if t.kind == "EOF":
                self.fail("unterminated group: expected '}'")
            if t.is_("PUNCT", "."):
                self.advance()
            elif t.keyword("OPTIONAL"):
                self.advance()
                elements.append(OptionalPattern(self.group()))
            elif t.keyword("FILTER"):
                self.advance()
                elements.append(self.filter())
            elif t.is_("PUNCT", "{"):
                self.fail("nested group patterns are not supported")
            elif t.kind == "NAME" and t.text.upper() in ("UNION", "BIND", "VALUES", "MINUS", "GRAPH", "SERVICE"):
                self.fail(f"{t.text.upper()} is not supported")
            else:
                self.triples(elements)
        self.advance()
        return GroupPattern(tuple(elements))

    def filter(self):
        if self.tok.keyword("NOT"):
            self.advance()
            self.expect_keyword("EXISTS")
            return NotExists(self.group())
        if self.tok.keyword("EXISTS"):
            self.fail("FILTER EXISTS is not supported")
        if self.tok.is_("PUNCT", "("):
            self.advance()
            expr = self.expression()
            self.expect_punct(")")
            return Filter(expr)
        if self.tok.kind == "NAME":
            return Filter(self.primary())
        self.fail("expected '(' after FILTER")

    def triples(self, out: list) -> None:
        subject = self.node(position="subject")
        while True:
            verb = self.verb()
            while True:
                out.append(TriplePattern(subject, verb, self.node(position="object")))
                if not self.tok.is_("PUNCT", ","):
                    break
                self.advance()
            if not self.tok.is_("PUNCT", ";"):
                break
            while self.tok.is_("PUNCT", ";"):
                self.advance()
            if self.tok.is_("PUNCT", ".") or self.tok.is_("PUNCT", "}"):
                break

    def verb(self):
        t = self.tok
        if t.is_("NAME", "a"):
            self.advance()
            return RDF_TYPE
        if t.kind == "VAR":
            return Var(self.advance().text[1:])
        if t.kind in ("IRIREF", "PNAME"):
            return self.iri()
        self.fail("expected predicate")

    def node(self, position: str):
        t = self.tok
        if t.kind == "VAR":
            return Var(self.advance().text[1:])
        if t.kind in ("IRIREF", "PNAME"):
            return self.iri()
        if position == "object" and (t.kind in _NUMBERS or t.kind == "STRING" or t.text in ("true", "false")):
            return self.literal()
        if t.kind == "BNODE" or t.is_("PUNCT", "["):
            self.fail("blank nodes are not supported in queries")
        self.fail(f"expected {position}")

    def iri(self) -> Iri:
        t = self.advance()
        if t.kind == "IRIREF":
            try:
                return Iri(unescape_iri(t.text[1:-1], t))
            except (StructuralError, ValueError) as exc:
                self.fail(str(exc), t)
        label, _, local = t.text.partition(":")
        if label not in self.prefixes:
            self.fail(f"undeclared prefix {label!r}", t)
        return Iri(self.prefixes[label] + local)

    def literal(self) -> Literal:
        t = self.advance()
        if t.kind in _NUMBERS:
            return Literal(t.text, _NUMBERS[t.kind])
        if t.kind == "NAME":
            return Literal(t.text, XSD_BOOLEAN)
        try:
            text = unescape_string(t.text[1:-1], t)
        except ValueError as exc:
            self.fail(str(exc), t)
        if self.tok.kind == "LANGTAG":
            return Literal(text, RDF_LANGSTRING, self.advance().text[1:])
        if self.tok.is_("OP", "^^"):
            self.advance()
            datatype = self.iri().value
            try:
                return Literal(text, datatype)
            except StructuralError as exc:
                self.fail(str(exc), t)
        return Literal(text, XSD_STRING)

    # expressions

    def expression(self):
        left = self.relational()
        while self.tok.is_("OP", "&&"):
            self.advance()
            left = And(left, self.relational())
        if self.tok.is_("OP", "||"):
            self.fail("'||' is not supported")
        return left

    def relational(self):
        left = self.primary()
        if self.tok.kind == "OP" and self.tok.text in _COMPARATORS:
            op = self.advance().text
            return Comparison(op, left, self.primary())
        return left

    def primary(self):
        t = self.tok
        if t.is_("PUNCT", "("):
            self.advance()
            inner = self.expression()
            self.expect_punct(")")
            return inner
        if t.kind == "VAR":
            return Var(self.advance().text[1:])
        if t.kind in ("IRIREF", "PNAME"):
            return self.iri()
        if t.kind in _NUMBERS or t.kind == "STRING" or t.text in ("true", "false"):
            return self.literal()
        if t.kind == "NAME":
            name = t.text.upper()
            if name not in FUNCTIONS:
                self.fail(f"unknown function {t.text}")
            self.advance()
            self.expect_punct("(")
            args = [self.expression()]
            while self.tok.is_("PUNCT", ","):
                self.advance()
                args.append(self.expression())
            self.expect_punct(")")
            if len(args) != FUNCTIONS[name]:
                self.fail(f"{name} takes {FUNCTIONS[name]} argument(s)", t)
            return Call(name, tuple(args))
        self.fail("expected expression")

    # static checks

    def check_scope(self, q: SelectQuery) -> None:
        if q.projection is None:
            if q.group_by:
                self.fail("SELECT * cannot be combined with GROUP BY", self.tokens[0])
            return
        in_scope = set(q.where.variables())
        grouped = {v.name for v in q.group_by}
        aggregated = bool(q.aggregates) or bool(q.group_by)
        for item in q.projection:
            if isinstance(item, Var):
                if aggregated and item.name not in grouped:
                    self.fail(f"?{item.name} is projected but neither grouped nor aggregated", self.tokens[0])
                if item.name not in in_scope and item.name not in grouped:
                    self.fail(f"?{item.name} is projected but never bound in WHERE", self.tokens[0])


def parse_query(text: str, prefixes: Optional[dict] = None) -> SelectQuery:
    """Parse query text.

    The standard prefixes (``:``, rdf, rdfs, xsd, conceptnet, dul) are always
    available; ``prefixes`` and then the query's own PREFIX lines override them.
    """
    return _QueryParser(text, prefixes).query()
