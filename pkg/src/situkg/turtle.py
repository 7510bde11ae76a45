"""Turtle subset reader and writer.

Supported: ``@prefix``/``PREFIX``, ``@base``/``BASE``, IRI references,
prefixed names, ``a``, ``;`` and ``,`` lists, quoted strings with escapes,
language tags, ``^^`` datatypes, bare integers/decimals/doubles/booleans,
labelled blank nodes and comments.  Collections and ``[ ]`` nodes raise.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Optional
from urllib.parse import urljoin

from situkg.errors import ParseError, StructuralError, TurtleSyntaxError
from situkg.graph import Graph, Triple
from situkg.lexer import Lexer, Token, unescape_iri, unescape_string
from situkg.terms import (
    RDF_LANGSTRING,
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    BlankNode,
    Iri,
    Literal,
    PrefixMap,
    Term,
    term_sort_key,
    valid_prefix_label,
)

_NUMBER_TYPES = {"INTEGER": XSD_INTEGER, "DECIMAL": XSD_DECIMAL, "DOUBLE": XSD_DOUBLE}


class _Fail(Exception):
    def __init__(self, token: Token, message: str):
        self.error = ParseError(token.line, token.column, message, token.text)


class _TurtleParser:
    def __init__(self, text: str, prefixes: Optional[PrefixMap] = None):
        self.tokens, self.errors = Lexer(text).tokens()
        self.pos = 0
        self.prefixes = PrefixMap(prefixes or {})
        self.declared = PrefixMap()
        self.base: Optional[str] = None
        self.graph = Graph()

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def expect(self, kind: str, text: Optional[str] = None, what: str = "") -> Token:
        t = self.tok
        if not t.is_(kind, text):
            raise _Fail(t, f"expected {what or text or kind}")
        return self.advance()

    # grammar

    def parse(self) -> Graph:
        while self.tok.kind != "EOF":
            start = self.pos
            pending: list[Triple] = []
            try:
                self.statement(pending)
            except _Fail as exc:
                self.errors.append(exc.error)
                self.recover(start)
                continue
            except StructuralError as exc:
                t = self.tokens[max(self.pos - 1, start)]
                self.errors.append(ParseError(t.line, t.column, str(exc), t.text))
                self.recover(start)
                continue
            for t in pending:
                self.graph.add(t)
        self.errors.sort(key=lambda e: (e.line, e.column))
        return self.graph

    def recover(self, start: int) -> None:
        if self.pos == start:
            self.advance()
        while self.tok.kind != "EOF":
            if self.advance().is_("PUNCT", "."):
                return

    def statement(self, pending: list[Triple]) -> None:
        t = self.tok
        if (t.kind == "NAME" and t.text.upper() in ("PREFIX", "BASE")) or t.text in ("@prefix", "@base"):
            self.directive()
            return
        if t.kind == "LANGTAG":
            raise _Fail(t, "unknown directive")
        subject = self.subject()
        self.predicate_object_list(subject, pending)
        self.expect("PUNCT", ".", "'.' at end of statement")

    def directive(self) -> None:
        t = self.advance()
        sparql_style = t.kind == "NAME"
        if t.text.lower().endswith("prefix"):
            name = self.expect("PNAME", what="prefix name ending in ':'")
            label, _, local = name.text.partition(":")
            if local:
                raise _Fail(name, "prefix name must end with ':'")
            ns = self.iriref(self.expect("IRIREF", what="namespace IRI"))
            self.prefixes[label] = ns
            self.declared[label] = ns
        else:
            self.base = self.iriref(self.expect("IRIREF", what="base IRI"))
        if not sparql_style:
            self.expect("PUNCT", ".", "'.' after directive")

    def subject(self) -> Term:
        t = self.tok
        if t.kind in ("IRIREF", "PNAME"):
            return self.iri()
        if t.kind == "BNODE":
            self.advance()
            return BlankNode(t.text[2:])
        self._reject_unsupported(t)
        raise _Fail(t, "expected subject")

    def predicate_object_list(self, subject: Term, pending: list[Triple]) -> None:
        while True:
            predicate = self.verb()
            while True:
                pending.append(self._triple(subject, predicate, self.object()))
                if not self.tok.is_("PUNCT", ","):
                    break
                self.advance()
            if not self.tok.is_("PUNCT", ";"):
                return
            while self.tok.is_("PUNCT", ";"):
                self.advance()
            if self.tok.is_("PUNCT", ".") or self.tok.kind == "EOF":
                return

    def verb(self) -> Iri:
        t = self.tok
        if t.is_("NAME", "a"):
            self.advance()
            return RDF_TYPE
        if t.kind in ("IRIREF", "PNAME"):
            return self.iri()
        raise _Fail(t, "expected predicate")

    def object(self) -> Term:
        t = self.tok
        if t.kind in ("IRIREF", "PNAME"):
            return self.iri()
        if t.kind == "BNODE":
            self.advance()
            return BlankNode(t.text[2:])
        if t.kind == "STRING":
            return self.literal()
        if t.kind in _NUMBER_TYPES:
            self.advance()
            return Literal(t.text, _NUMBER_TYPES[t.kind])
        if t.kind == "NAME" and t.text in ("true", "false"):
            self.advance()
            return Literal(t.text, XSD_BOOLEAN)
        self._reject_unsupported(t)
        raise _Fail(t, "expected object")

    def literal(self) -> Literal:
        t = self.advance()
        try:
            text = unescape_string(t.text[1:-1], t)
        except ValueError as exc:
            raise _Fail(t, str(exc)) from None
        if self.tok.kind == "LANGTAG":
            return Literal(text, RDF_LANGSTRING, self.advance().text[1:])
        if self.tok.is_("OP", "^^"):
            self.advance()
            return Literal(text, self.iri().value)
        return Literal(text, XSD_STRING)

    def iri(self) -> Iri:
        t = self.advance()
        if t.kind == "IRIREF":
            return Iri(self.iriref(t))
        if t.kind != "PNAME":
            raise _Fail(t, "expected IRI")
        label, _, local = t.text.partition(":")
        if label not in self.prefixes:
            raise _Fail(t, f"undeclared prefix {label!r}")
        return self._make_iri(self.prefixes[label] + local, t)

    def iriref(self, t: Token) -> str:
        try:
            value = unescape_iri(t.text[1:-1], t)
        except ValueError as exc:
            raise _Fail(t, str(exc)) from None
        if self.base is not None:
            value = urljoin(self.base, value)
        self._make_iri(value, t)
        return value

    def _make_iri(self, value: str, t: Token) -> Iri:
        try:
            return Iri(value)
        except StructuralError:
            raise _Fail(t, "relative IRI without a base") from None

    def _triple(self, s: Term, p: Iri, o: Term) -> Triple:
        return Triple(s, p, o)

    def _reject_unsupported(self, t: Token) -> None:
        if t.is_("PUNCT", "("):
            raise _Fail(t, "RDF collections '( )' are not supported")
        if t.is_("PUNCT", "["):
            raise _Fail(t, "anonymous blank nodes '[ ]' are not supported")


def parse_turtle(text: str, prefixes: Optional[PrefixMap] = None) -> tuple[Graph, PrefixMap]:
    """Parse Turtle text into a graph and the prefixes it declares.

    ``prefixes`` pre-binds labels the text may use without declaring them.
    Raises :class:`TurtleSyntaxError` carrying every error found; the parser
    resynchronises at the next ``.`` after each error.
    """
    parser = _TurtleParser(text, prefixes)
    graph = parser.parse()
    if parser.errors:
        raise TurtleSyntaxError(parser.errors)
    graph.prefixes = parser.prefixes.copy()
    return graph, parser.declared


def load_turtle(paths: Iterable[str | Path], prefixes: Optional[PrefixMap] = None) -> Graph:
    """Parse several files into one graph; prefix declarations accumulate."""
    merged = PrefixMap(prefixes or {})
    graph = Graph(prefixes=merged)
    for path in paths:
        text = Path(path).read_text(encoding="utf-8")
        try:
            part, declared = parse_turtle(text, merged)
        except TurtleSyntaxError as exc:
            raise TurtleSyntaxError(
                [ParseError(e.line, e.column, f"{path}: {e.message}", e.token) for e in exc.errors]
            ) from None
        merged.update(declared)
        graph.update(part)
    graph.prefixes = merged
    return graph


# -- writer ------------------------------------------------------------------

_BARE = {
    XSD_INTEGER: re.compile(r"[+-]?\d+"),
    XSD_DECIMAL: re.compile(r"[+-]?\d*\.\d+"),
    XSD_DOUBLE: re.compile(r"[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+)"),
    XSD_BOOLEAN: re.compile(r"true|false"),
}
_STRING_ESCAPES = {'"': '\\"', "\\": "\\\\", "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _escape_string(text: str) -> str:
    out = []
    for ch in text:
        if ch in _STRING_ESCAPES:
            out.append(_STRING_ESCAPES[ch])
        elif ord(ch) < 0x20 or ch == "\x7f" or 0xD800 <= ord(ch) <= 0xDFFF:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def _escape_iri(value: str) -> str:
    return "".join(
        f"\\u{ord(ch):04X}" if ch in '<>"{}|^`\\' or ord(ch) <= 0x20 else ch for ch in value
    )


def format_term(term: Term, prefixes: PrefixMap) -> str:
    """Turtle spelling of one term."""
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    if isinstance(term, Iri):
        curie = prefixes.shrink(term.value)
        return curie if curie is not None else f"<{_escape_iri(term.value)}>"
    bare = _BARE.get(term.datatype)
    if bare is not None and bare.fullmatch(term.lexical):
        return term.lexical
    text = f'"{_escape_string(term.lexical)}"'
    if term.language:
        return f"{text}@{term.language}"
    if term.datatype == XSD_STRING:
        return text
    return f"{text}^^{format_term(Iri(term.datatype), prefixes)}"


def serialize_turtle(graph: Graph, prefixes: Optional[PrefixMap] = None) -> str:
    """Deterministic Turtle: one prefix block, then subjects in term order."""
    if prefixes is None:
        prefixes = graph.prefixes
    usable = PrefixMap({k: v for k, v in prefixes.items() if valid_prefix_label(k) and v})
    lines = [f"@prefix {label}: <{_escape_iri(ns)}> ." for label, ns in sorted(usable.items())]

    by_subject: dict[Term, dict[Iri, list[Term]]] = {}
    for t in graph:
        by_subject.setdefault(t.subject, {}).setdefault(t.predicate, []).append(t.object)

    for subject in sorted(by_subject, key=term_sort_key):
        if lines:
            lines.append("")
        preds = by_subject[subject]
        order = sorted(preds, key=lambda p: (p != RDF_TYPE, term_sort_key(p)))
        head = format_term(subject, usable)
        chunks = []
        for pred in order:
            verb = "a" if pred == RDF_TYPE else format_term(pred, usable)
            objs = [format_term(o, usable) for o in sorted(preds[pred], key=term_sort_key)]
            chunks.append(f"{verb} " + ",\n        ".join(objs))
        lines.append(head + " " + " ;\n    ".join(chunks) + " .")
    return "\n".join(lines) + ("\n" if lines else "")
