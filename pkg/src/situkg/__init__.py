"""situkg: a small knowledge-graph engine for situated data annotations."""

from situkg.graph import Graph, Triple
from situkg.terms import BlankNode, Iri, Literal
from situkg.turtle import load_turtle, parse_turtle, serialize_turtle
from situkg.vocabulary import builtin_schema, materialize_inference, validate

__version__ = "0.1.0"

__all__ = [
    "BlankNode",
    "Graph",
    "Iri",
    "Literal",
    "Triple",
    "builtin_schema",
    "load_turtle",
    "materialize_inference",
    "parse_turtle",
    "serialize_turtle",
    "validate",
]
