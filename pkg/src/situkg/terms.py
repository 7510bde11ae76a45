"""RDF terms, namespaces and CURIE handling."""

from __future__ import annotations

import datetime
import math
import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from functools import cmp_to_key
from typing import Optional, Union

from situkg.errors import StructuralError, UnknownPrefixError

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
SITU = "https://w3id.org/situannotate#"
DUL = "http://www.ontologydesignpatterns.org/ont/dul/DUL.owl#"
CONCEPTNET = "http://etna.istc.cnr.it/framester2/conceptnet/5.7.0/c/en/"

XSD_STRING = XSD + "string"
XSD_BOOLEAN = XSD + "boolean"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"
XSD_FLOAT = XSD + "float"
XSD_DATE = XSD + "date"
RDF_LANGSTRING = RDF + "langString"

# derived integer types compare exactly, like xsd:integer
_EXACT_NUMERIC = {
    XSD_INTEGER,
    XSD_DECIMAL,
    *(XSD + t for t in (
        "int", "long", "short", "byte", "nonNegativeInteger", "positiveInteger",
        "nonPositiveInteger", "negativeInteger", "unsignedInt", "unsignedLong",
        "unsignedShort", "unsignedByte",
    )),
}
_FLOAT_NUMERIC = {XSD_DOUBLE, XSD_FLOAT}
NUMERIC_DATATYPES = frozenset(_EXACT_NUMERIC | _FLOAT_NUMERIC)

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_BNODE_LABEL = re.compile(r"[\w\-](?:[\w\-.]*[\w\-])?")
_DATE = re.compile(r"^(-?\d{4,})-(\d\d)-(\d\d)(Z|[+-]\d\d:\d\d)?$")


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __post_init__(self):
        if not isinstance(self.value, str) or not _SCHEME.match(self.value):
            raise StructuralError(f"not an absolute IRI: {self.value!r}")

    def __str__(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True, slots=True)
class BlankNode:
    label: str

    def __post_init__(self):
        if not isinstance(self.label, str) or not _BNODE_LABEL.fullmatch(self.label):
            raise StructuralError(f"invalid blank node label: {self.label!r}")

    def __str__(self) -> str:
        return f"_:{self.label}"


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    language: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.lexical, str):
            raise StructuralError(f"literal lexical form must be a string: {self.lexical!r}")
        if self.language is not None:
            if not self.language:
                raise StructuralError("empty language tag")
            if self.datatype == XSD_STRING:
                object.__setattr__(self, "datatype", RDF_LANGSTRING)
            elif self.datatype != RDF_LANGSTRING:
                raise StructuralError("language tag requires the rdf:langString datatype")
            object.__setattr__(self, "language", self.language.lower())
        elif self.datatype == RDF_LANGSTRING:
            raise StructuralError("rdf:langString literal without a language tag")
        if not _SCHEME.match(self.datatype):
            raise StructuralError(f"datatype is not an absolute IRI: {self.datatype!r}")

    def __str__(self) -> str:
        text = '"' + self.lexical.replace("\\", "\\\\").replace('"', '\\"') + '"'
        if self.language:
            return f"{text}@{self.language}"
        if self.datatype == XSD_STRING:
            return text
        return f"{text}^^<{self.datatype}>"


Term = Union[Iri, BlankNode, Literal]


def iri(value: str) -> Iri:
    return Iri(value)


def situ(local: str) -> Iri:
    return Iri(SITU + local)


RDF_TYPE = Iri(RDF + "type")
RDFS_SUBCLASSOF = Iri(RDFS + "subClassOf")
RDFS_LABEL = Iri(RDFS + "label")
RDFS_COMMENT = Iri(RDFS + "comment")


def local_name(term: Term) -> str:
    """The part of an IRI after its last ``#`` or ``/``; lexical form for literals."""
    if isinstance(term, Literal):
        return term.lexical
    if isinstance(term, BlankNode):
        return term.label
    value = term.value
    cut = max(value.rfind("#"), value.rfind("/"))
    return value[cut + 1:] if cut >= 0 and cut + 1 < len(value) else value


# -- literal value spaces ----------------------------------------------------


def numeric_value(term: Term) -> Optional[Decimal]:
    """Exact value of a numeric literal, or None when the term is not a usable number.

    Doubles are converted through binary floating point, so ``"0.1"^^xsd:double``
    becomes the exact value of the nearest float.
    """
    if not isinstance(term, Literal) or term.datatype not in NUMERIC_DATATYPES:
        return None
    text = term.lexical.strip()
    try:
        if term.datatype in _FLOAT_NUMERIC:
            value = float(text)
            if math.isnan(value):
                return None
            return Decimal(value)
        if term.datatype != XSD_DECIMAL and not re.fullmatch(r"[+-]?\d+", text):
            return None
        if not re.fullmatch(r"[+-]?(\d+\.?\d*|\.\d+)", text):
            return None
        return Decimal(text)
    except (ValueError, InvalidOperation):
        return None


def date_value(term: Term) -> Optional[datetime.date]:
    if not isinstance(term, Literal) or term.datatype != XSD_DATE:
        return None
    return parse_date(term.lexical)


def parse_date(text: str) -> Optional[datetime.date]:
    m = _DATE.match(text)
    if not m:
        return None
    try:
        return datetime.date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    except ValueError:
        return None


# -- ordering ----------------------------------------------------------------


def term_sort_key(term: Term) -> tuple:
    """Key realising the total order BlankNode < Iri < Literal.

    Literals group as numbers (by value), then dates (calendar order), then
    everything else by (datatype, lexical form, language).  The trailing
    datatype/lexical components keep the order antisymmetric for distinct
    terms with equal values, such as ``1.0`` and ``1.00``.
    """
    if isinstance(term, BlankNode):
        return (0, term.label)
    if isinstance(term, Iri):
        return (1, term.value)
    number = numeric_value(term)
    if number is not None:
        return (2, 0, number, term.datatype, term.lexical)
    day = date_value(term)
    if day is not None:
        return (2, 1, day.toordinal(), term.lexical)
    return (2, 2, term.datatype, term.lexical, term.language or "")


def compare_terms(a: Term, b: Term) -> int:
    """Return -1, 0 or 1."""
    ka, kb = term_sort_key(a), term_sort_key(b)
    return (ka > kb) - (ka < kb)


term_cmp_key = cmp_to_key(compare_terms)


# -- prefixes ----------------------------------------------------------------

_PREFIX_LABEL = re.compile(r"(?:[A-Za-z](?:[\w\-.]*[\w\-])?)?")
LOCAL_NAME = re.compile(r"(?:[\w\-](?:[\w\-.]*[\w\-])?)?")


class PrefixMap(dict):
    """Prefix label -> namespace IRI.  The empty label is the default prefix."""

    def expand(self, token: str) -> Iri:
        return expand_curie(self, token)

    def shrink(self, value: str) -> Optional[str]:
        """Render ``value`` as a CURIE using the longest matching namespace.

        Ties go to the shorter, then alphabetically first, prefix label.
        Returns None when no namespace matches or the remainder is not a
        valid local name.
        """
        best = None
        for label, ns in self.items():
            if ns and value.startswith(ns) and LOCAL_NAME.fullmatch(value[len(ns):]):
                rank = (-len(ns), len(label), label)
                if best is None or rank < best[0]:
                    best = (rank, label, ns)
        if best is None:
            return None
        _, label, ns = best
        return f"{label}:{value[len(ns):]}"

    def copy(self) -> "PrefixMap":
        return PrefixMap(self)


def default_prefixes(base: Optional[str] = None) -> PrefixMap:
    return PrefixMap({
        "": base or SITU,
        "rdf": RDF,
        "rdfs": RDFS,
        "xsd": XSD,
        "conceptnet": CONCEPTNET,
        "dul": DUL,
    })


def expand_curie(prefixes: dict, token: str) -> Iri:
    if token == "a":
        return RDF_TYPE
    prefix, sep, local = token.partition(":")
    if not sep:
        raise StructuralError(f"not a prefixed name: {token!r}")
    if prefix not in prefixes:
        raise UnknownPrefixError(prefix)
    return Iri(prefixes[prefix] + local)


def valid_prefix_label(label: str) -> bool:
    return bool(_PREFIX_LABEL.fullmatch(label))
