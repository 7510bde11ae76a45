"""SPARQL-subset queries: templates, parsing, evaluation and the bundled CQ texts."""

from __future__ import annotations

import re
from importlib import resources
from typing import Mapping

from situkg.errors import MissingParameterError
from situkg.query.ast import SelectQuery, Var
from situkg.query.evaluate import SolutionSequence, evaluate
from situkg.query.parser import parse_query

__all__ = [
    "CQ_NUMBERS",
    "SelectQuery",
    "SolutionSequence",
    "Var",
    "bundled_query",
    "competency_query",
    "evaluate",
    "parse_query",
    "substitute_params",
]

_SLOT = re.compile(r"\{\{(\w+)\}\}")
CQ_NUMBERS = range(1, 12)


def substitute_params(query_text: str, params: Mapping[str, str]) -> str:
    """Replace every ``{{name}}`` slot with ``params[name]`` verbatim.

    Raises :class:`MissingParameterError` for the first slot without a value.
    """
    for m in _SLOT.finditer(query_text):
        if m.group(1) not in params:
            raise MissingParameterError(m.group(1))
    return _SLOT.sub(lambda m: str(params[m.group(1)]), query_text)


def bundled_query(name: str) -> str:
    """Text of a query file shipped in ``situkg/data/queries`` (without ``.rq``)."""
    return resources.files("situkg").joinpath("data", "queries", f"{name}.rq").read_text(encoding="utf-8")


def competency_query(number: int) -> str:
    if number not in CQ_NUMBERS:
        raise ValueError(f"competency questions are numbered 1-11, got {number}")
    return bundled_query(f"cq{number:02d}")
