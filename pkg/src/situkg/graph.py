"""Indexed in-memory triple set."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from situkg.errors import StructuralError
from situkg.terms import BlankNode, Iri, Literal, PrefixMap, Term


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Term
    predicate: Iri
    object: Term

    def __post_init__(self):
        if not isinstance(self.subject, (Iri, BlankNode)):
            raise StructuralError(f"subject must be an IRI or blank node, got {self.subject!r}")
        if not isinstance(self.predicate, Iri):
            raise StructuralError(f"predicate must be an IRI, got {self.predicate!r}")
        if not isinstance(self.object, (Iri, BlankNode, Literal)):
            raise StructuralError(f"object is not an RDF term: {self.object!r}")

    def __iter__(self):
        yield self.subject
        yield self.predicate
        yield self.object


class Graph:
    """Set of triples with subject, predicate-object and object indexes.

    Iteration and match results follow insertion order.  Call :meth:`freeze`
    once construction is done; a frozen graph rejects writes and can be
    shared between readers.
    """

    def __init__(self, triples: Iterable[Triple] = (), prefixes: Optional[PrefixMap] = None):
        # dicts double as insertion-ordered sets
        self._triples: dict[Triple, None] = {}
        self._by_s: dict[Term, dict[Triple, None]] = {}
        self._by_po: dict[tuple[Term, Term], dict[Triple, None]] = {}
        self._by_o: dict[Term, dict[Triple, None]] = {}
        self.prefixes = PrefixMap(prefixes or {})
        self._frozen = False
        for t in triples:
            self.add(t)

    def add(self, triple: Triple) -> bool:
        """Insert ``triple``; return True when it was not already present."""
        if self._frozen:
            raise RuntimeError("graph is frozen")
        if not isinstance(triple, Triple):
            raise StructuralError(f"not a Triple: {triple!r}")
        if triple in self._triples:
            return False
        self._triples[triple] = None
        s, p, o = triple.subject, triple.predicate, triple.object
        self._by_s.setdefault(s, {})[triple] = None
        self._by_po.setdefault((p, o), {})[triple] = None
        self._by_o.setdefault(o, {})[triple] = None
        return True

    def update(self, triples: Iterable[Triple]) -> int:
        return sum(self.add(t) for t in triples)

    def remove(self, triple: Triple) -> bool:
        if self._frozen:
            raise RuntimeError("graph is frozen")
        if triple not in self._triples:
            return False
        del self._triples[triple]
        for index, key in (
            (self._by_s, triple.subject),
            (self._by_po, (triple.predicate, triple.object)),
            (self._by_o, triple.object),
        ):
            bucket = index[key]
            del bucket[triple]
            if not bucket:
                del index[key]
        return True

    def match(
        self,
        subject: Optional[Term] = None,
        predicate: Optional[Term] = None,
        obj: Optional[Term] = None,
    ) -> list[Triple]:
        """Triples agreeing with every non-None position."""
        if subject is not None:
            candidates = self._by_s.get(subject, ())
        elif predicate is not None and obj is not None:
            return list(self._by_po.get((predicate, obj), ()))
        elif obj is not None:
            candidates = self._by_o.get(obj, ())
        else:
            candidates = self._triples
        return [
            t for t in candidates
            if (predicate is None or t.predicate == predicate)
            and (obj is None or t.object == obj)
        ]

    def objects(self, subject: Term, predicate: Term) -> list[Term]:
        return [t.object for t in self.match(subject, predicate, None)]

    def subjects(self, predicate: Term, obj: Term) -> list[Term]:
        return [t.subject for t in self.match(None, predicate, obj)]

    def value(self, subject: Term, predicate: Term) -> Optional[Term]:
        found = self.objects(subject, predicate)
        return found[0] if found else None

    def terms(self) -> list[Term]:
        """Every distinct term in any position, in first-seen order."""
        seen: dict[Term, None] = {}
        for t in self._triples:
            seen.setdefault(t.subject)
            seen.setdefault(t.predicate)
            seen.setdefault(t.object)
        return list(seen)

    def copy(self) -> "Graph":
        return Graph(self._triples, self.prefixes)

    def freeze(self) -> "Graph":
        self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, triple: object) -> bool:
        return triple in self._triples

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples.keys() == other._triples.keys()

    def __repr__(self) -> str:
        return f"<Graph {len(self)} triples>"


def graph_insert(graph: Graph, triple: Triple) -> bool:
    return graph.add(triple)


def graph_match(graph: Graph, pattern: tuple) -> list[Triple]:
    s, p, o = pattern
    return graph.match(s, p, o)
