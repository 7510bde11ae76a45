"""Situated explanations of a single label attached to an entity."""

from __future__ import annotations

import datetime
from dataclasses import dataclass, replace
from decimal import Decimal
from typing import Optional

from situkg.errors import LabelInjectionError, MissingParameterError
from situkg.graph import Graph
from situkg.query import bundled_query, evaluate, parse_query, substitute_params
from situkg.query.ast import SelectQuery, Var
from situkg.terms import LOCAL_NAME, Iri, Literal, date_value, local_name, numeric_value, situ


@dataclass(frozen=True)
class ExplanationContext:
    entity_id: Iri
    entity_type: Iri
    label: str
    strength: Decimal
    date: datetime.date
    place: Iri
    annotator: Iri
    architecture: Optional[Iri] = None  # None for human annotators
    training_dataset: Optional[Iri] = None
    annotated_dataset: Optional[Iri] = None

    def __post_init__(self):
        if not 0 <= self.strength <= 1:
            raise ValueError(f"strength {self.strength} is outside [0, 1]")

    @property
    def is_artificial(self) -> bool:
        return self.architecture is not None


def _slots(entity_id: str, label: str) -> dict[str, str]:
    if not label:
        raise MissingParameterError("label")
    if not entity_id or not LOCAL_NAME.fullmatch(entity_id):
        raise LabelInjectionError(f"entity id {entity_id!r} is not a plain local name")
    # the label is pasted between double quotes in the query text
    bad = [c for c in label if c in '"\\\n\r']
    if bad:
        raise LabelInjectionError(f"label {label!r} contains {bad[0]!r}, which cannot be placed in a quoted query slot")
    return {"entity_ID": entity_id, "label": f'"{label}"'}


def build_explanation_query(entity_id: str, label: str) -> SelectQuery:
    """The bundled explanation query with both template slots filled, parsed."""
    return parse_query(substitute_params(bundled_query("explain"), _slots(entity_id, label)))


def _relaxed_query(entity_id: str, label: str) -> SelectQuery:
    return parse_query(substitute_params(bundled_query("explain_relaxed"), _slots(entity_id, label)))


def explain(graph: Graph, entity_id: str, label: str) -> list[ExplanationContext]:
    """One context per (annotation, situation) solution; ``graph`` should be materialized.

    The bundled query needs architecture and pretraining triples, so it is
    run first (also projecting the pretraining dataset), and a relaxed variant
    with those patterns optional supplies the rows of human annotators.
    """
    strict = build_explanation_query(entity_id, label)
    strict = replace(strict, projection=strict.projection + (Var("pretrainedDataset"),))
    rows = list(evaluate(graph, strict))
    rows += [r for r in evaluate(graph, _relaxed_query(entity_id, label)) if "architecture" not in r]

    entity = situ(entity_id)
    out = []
    for row in rows:
        strength = numeric_value(row["strength"])
        day = date_value(row["date"])
        if strength is None or day is None:
            continue  # ill-typed data; validate() reports it
        out.append(ExplanationContext(
            entity_id=entity,
            entity_type=row["entity_type"],
            label=label,
            strength=strength,
            date=day,
            place=row["place"],
            annotator=row["annotator"],
            architecture=row.get("architecture"),
            training_dataset=row.get("pretrainedDataset"),
            annotated_dataset=row.get("dataset"),
        ))
    return out


def _name(term) -> str:
    return term.lexical if isinstance(term, Literal) else local_name(term)


def render_narrative(ctx: ExplanationContext) -> str:
    """Fixed-template paragraph describing ``ctx``; byte-deterministic."""
    text = (
        f"The entity '{_name(ctx.entity_id)}' (a {_name(ctx.entity_type)}) was annotated with the label "
        f"'{ctx.label}' with strength {format(ctx.strength, 'f')}. "
        f"This annotation was produced on {ctx.date.isoformat()} in {_name(ctx.place)} by "
    )
    if ctx.is_artificial:
        text += (
            f"annotator '{_name(ctx.annotator)}', an artificial annotator with a "
            f"{_name(ctx.architecture)} model architecture"
        )
        if ctx.training_dataset is not None:
            text += f" pretrained on the {_name(ctx.training_dataset)} dataset"
    else:
        text += f"human annotator '{_name(ctx.annotator)}'"
    if ctx.annotated_dataset is not None:
        text += f", within an annotation of the {_name(ctx.annotated_dataset)} dataset"
    return text + "."


def render_narratives(contexts: list[ExplanationContext]) -> str:
    return "\n\n".join(render_narrative(c) for c in contexts)
