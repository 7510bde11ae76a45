"""Turn flat annotation-event records into situation-shaped triples."""

from __future__ import annotations

import datetime
import json
import re
from dataclasses import MISSING, dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

from situkg.errors import ConflictError, EventError, StructuralError
from situkg.graph import Graph, Triple
from situkg.terms import (
    RDF_TYPE,
    RDFS_COMMENT,
    RDFS_LABEL,
    SITU,
    XSD_DATE,
    XSD_DECIMAL,
    XSD_STRING,
    Iri,
    Literal,
    default_prefixes,
    parse_date,
    situ,
)
from situkg.vocabulary import DEMOGRAPHICS, builtin_schema

_ID = re.compile(r"[A-Za-z0-9_\-]+")


@dataclass(frozen=True)
class ArtificialAnnotator:
    id: str
    architecture: str
    pretrained_dataset: str


@dataclass(frozen=True)
class HumanIndividual:
    id: str
    demographics: tuple[tuple[str, str], ...] = ()  # (DEMOGRAPHICS key, value id)


@dataclass(frozen=True)
class HumanCommunity:
    id: str
    demographics: tuple[tuple[str, str], ...] = ()  # predominant values


AnnotatorSpec = Union[ArtificialAnnotator, HumanIndividual, HumanCommunity]
_ANNOTATOR_KINDS = {
    "artificial": ArtificialAnnotator,
    "human_individual": HumanIndividual,
    "human_community": HumanCommunity,
}


@dataclass(frozen=True)
class AnnotationEvent:
    """One label attached to one entity in one annotation situation.

    ``annotation_id`` is optional; several labels produced in the same
    situation (the three colors of an image, say) need distinct ids.
    """

    entity_id: str
    label: str
    role: str
    strength: Decimal
    situation_id: str
    situation_type: str
    date: datetime.date
    place: str
    dataset: str
    description_id: str
    annotator: AnnotatorSpec
    entity_type: str = "Image"
    concept_iri: Optional[str] = None
    detection_threshold: Optional[str] = None
    remuneration_scheme: Optional[str] = None
    description_comment: Optional[str] = None
    annotation_id: Optional[str] = None

    def __post_init__(self):
        ids = {
            "entity_id": self.entity_id, "role": self.role, "situation_id": self.situation_id,
            "place": self.place, "dataset": self.dataset, "description_id": self.description_id,
            "annotator.id": self.annotator.id, "situation_type": self.situation_type,
            "entity_type": self.entity_type,
        }
        if isinstance(self.annotator, ArtificialAnnotator):
            ids["annotator.architecture"] = self.annotator.architecture
            ids["annotator.pretrained_dataset"] = self.annotator.pretrained_dataset
        else:
            for key, value in self.annotator.demographics:
                if key not in DEMOGRAPHICS:
                    raise EventError(f"unknown demographic attribute {key!r}")
                ids[f"annotator.{key}"] = value
        if self.remuneration_scheme is not None:
            ids["remuneration_scheme"] = self.remuneration_scheme
        if self.annotation_id is not None:
            ids["annotation_id"] = self.annotation_id
        for name, value in ids.items():
            if not isinstance(value, str) or not _ID.fullmatch(value):
                raise EventError(f"{name} {value!r} is not a valid id (letters, digits, '_' and '-' only)")
        if not isinstance(self.label, str) or not self.label:
            raise EventError("label must be a non-empty string")
        if not isinstance(self.strength, Decimal) or not self.strength.is_finite():
            raise EventError(f"strength {self.strength!r} is not a decimal number")
        if not 0 <= self.strength <= 1:
            raise EventError(f"strength {self.strength} is outside [0, 1]")
        if self.concept_iri is not None:
            if ":" not in self.concept_iri:
                raise EventError(f"concept_iri {self.concept_iri!r} is not an absolute IRI")
            try:
                Iri(self.concept_iri)
            except StructuralError as exc:
                raise EventError(f"concept_iri: {exc}") from None
        schema = builtin_schema()
        if not schema.is_a([situ(self.situation_type)], situ("AnnotationSituation")):
            raise EventError(f"situation_type {self.situation_type!r} is not an annotation situation class")
        if not schema.known_class(situ(self.entity_type)):
            raise EventError(f"entity_type {self.entity_type!r} is not a known class")
        if not self.is_caption and not _ID.fullmatch(lexical_entry_name(self.label)[3:]):
            raise EventError(f"label {self.label!r} cannot be turned into a lexical entry name")

    @property
    def annotation_class(self) -> str:
        """``<Kind>AnnotationSituation`` maps to ``<Kind>Annotation``; anything else to ``Annotation``."""
        name = self.situation_type.removesuffix("Situation")
        return name if builtin_schema().is_a([situ(name)], situ("Annotation")) else "Annotation"

    @property
    def is_caption(self) -> bool:
        return self.annotation_class == "ImageCaptionAnnotation"

    @property
    def annotation_name(self) -> str:
        if self.annotation_id is not None:
            return self.annotation_id
        entity = self.entity_id.removeprefix(self.dataset + "_")
        return f"{entity}_{self.situation_id}"

    @classmethod
    def from_dict(cls, record: Mapping) -> "AnnotationEvent":
        if not isinstance(record, Mapping):
            raise EventError("event must be a JSON object")
        fields = dict(record)
        unknown = set(fields) - set(cls.__dataclass_fields__)
        if unknown:
            raise EventError(f"unknown field(s): {', '.join(sorted(unknown))}")
        required = [n for n, f in cls.__dataclass_fields__.items() if f.default is MISSING and f.default_factory is MISSING]
        missing = [n for n in required if n not in fields]
        if missing:
            raise EventError(f"missing field(s): {', '.join(missing)}")
        fields["strength"] = _decimal(fields["strength"])
        day = parse_date(fields["date"]) if isinstance(fields["date"], str) else None
        if day is None:
            raise EventError(f"date {fields['date']!r} is not an ISO date (YYYY-MM-DD)")
        fields["date"] = day
        fields["annotator"] = _annotator(fields["annotator"])
        for name in ("label", "detection_threshold", "description_comment", "concept_iri"):
            if fields.get(name) is not None and not isinstance(fields[name], str):
                raise EventError(f"{name} must be a string")
        return cls(**fields)


def _decimal(value) -> Decimal:
    if isinstance(value, bool):
        raise EventError("strength must be a number")
    try:
        if isinstance(value, (int, Decimal)):
            return Decimal(value)
        if isinstance(value, float):
            return Decimal(repr(value))
        if isinstance(value, str):
            return Decimal(value)
    except InvalidOperation:
        pass
    raise EventError(f"strength {value!r} is not a decimal number")


def _annotator(value) -> AnnotatorSpec:
    if not isinstance(value, Mapping) or value.get("kind") not in _ANNOTATOR_KINDS:
        raise EventError(f"annotator must be an object whose kind is one of {', '.join(_ANNOTATOR_KINDS)}")
    kind = value["kind"]
    rest = {k: v for k, v in value.items() if k != "kind"}
    if kind == "artificial":
        if set(rest) != {"id", "architecture", "pretrained_dataset"}:
            raise EventError("artificial annotator needs exactly id, architecture and pretrained_dataset")
        return ArtificialAnnotator(**rest)
    demographics = rest.pop("demographics", {})
    if set(rest) != {"id"} or not isinstance(demographics, Mapping):
        raise EventError(f"{kind} annotator takes an id and an optional demographics object")
    return _ANNOTATOR_KINDS[kind](rest["id"], tuple(sorted(demographics.items())))


def lexical_entry_name(label: str) -> str:
    return "le_" + label.replace(" ", "_")


# -- triples -----------------------------------------------------------------


def build_triples(event: AnnotationEvent, base: Optional[str] = None) -> set[Triple]:
    """Every triple contributed by ``event``.

    Instance nodes are minted in ``base`` (default: the vocabulary namespace);
    classes and properties always come from the vocabulary namespace.  Both
    directions of each inverse pair are emitted so the output stands alone.
    """
    node = (lambda local: Iri((base or SITU) + local))
    v = situ
    out: set[Triple] = set()

    def add(s, p, o):
        out.add(Triple(s, p, o))

    entity = node(event.entity_id)
    annotation = node(event.annotation_name)
    situation = node(event.situation_id)
    description = node(event.description_id)
    role = node(event.role)
    annotator = node(event.annotator.id)

    add(annotation, RDF_TYPE, v(event.annotation_class))
    add(annotation, v("aboutAnnotatedEntity"), entity)
    if event.is_caption:
        # captions carry their text directly rather than through a lexical entry
        add(annotation, RDFS_COMMENT, Literal(event.label, XSD_STRING))
        add(entity, RDFS_COMMENT, Literal(event.label, XSD_STRING))
    else:
        entry = node(lexical_entry_name(event.label))
        add(annotation, v("annotationWithLexicalEntry"), entry)
        add(entry, RDFS_LABEL, Literal(event.label, XSD_STRING))
        if event.entity_type == "Image":
            add(entity, v("isAnnotatedWithLexicalEntry"), entry)
    add(annotation, v("hasAnnotationStrength"), Literal(format(event.strength, "f"), XSD_DECIMAL))
    add(annotation, v("isClassifiedBy"), role)
    if event.concept_iri is not None:
        add(annotation, v("typedByConcept"), Iri(event.concept_iri))
        if event.entity_type == "Image":
            add(entity, v("hasImageLabelTypedBy"), Iri(event.concept_iri))
    add(annotation, v("isAnnotationInvolvedInSituation"), situation)

    add(situation, RDF_TYPE, v(event.situation_type))
    add(situation, v("involvesAnnotatedEntity"), entity)
    add(entity, v("isInvolvedInAnnotationSituation"), situation)
    add(situation, v("atPlace"), node(event.place))
    add(situation, v("onDate"), Literal(event.date.isoformat(), XSD_DATE))
    add(situation, v("involvesAnnotator"), annotator)
    add(situation, v("involvesDataset"), node(event.dataset))
    add(situation, v("satisfies"), description)
    add(situation, v("involvesAnnotation"), annotation)
    if event.detection_threshold is not None:
        add(situation, v("hasDetectionThreshold"), Literal(event.detection_threshold, XSD_STRING))
    if event.remuneration_scheme is not None:
        add(situation, v("involvesRemunerationScheme"), node(event.remuneration_scheme))

    add(description, RDF_TYPE, v("ImageAnnotationDescription"))
    add(description, v("defines"), role)
    if event.description_comment is not None:
        add(description, RDFS_COMMENT, Literal(event.description_comment, XSD_STRING))

    spec = event.annotator
    if isinstance(spec, ArtificialAnnotator):
        add(annotator, RDF_TYPE, v("ArtificialAnnotator"))
        add(annotator, v("hasModelArchitecture"), node(spec.architecture))
        add(annotator, v("pretrainedOnDataset"), node(spec.pretrained_dataset))
    else:
        community = isinstance(spec, HumanCommunity)
        add(annotator, RDF_TYPE, v("HumanAnnotatorCommunity" if community else "IndividualHumanAnnotator"))
        for key, value in spec.demographics:
            add(annotator, v(DEMOGRAPHICS[key][community]), node(value))

    add(entity, RDF_TYPE, v(event.entity_type))
    return out


# properties that take one value per subject across all events
_SINGLE = {RDF_TYPE, RDFS_LABEL} | {situ(p) for p in (
    "aboutAnnotatedEntity", "annotationWithLexicalEntry", "hasAnnotationStrength", "isClassifiedBy",
    "typedByConcept", "isAnnotationInvolvedInSituation", "involvesAnnotatedEntity", "atPlace", "onDate",
    "involvesAnnotator", "involvesDataset", "satisfies", "hasDetectionThreshold",
    "involvesRemunerationScheme", "hasModelArchitecture", "pretrainedOnDataset",
)}


def build_graph(events: Iterable[AnnotationEvent], base: Optional[str] = None) -> Graph:
    """Union of the events' triples; raises :class:`ConflictError` on inconsistent reuse of a node."""
    graph = Graph(prefixes=default_prefixes(base))
    seen: dict[tuple[Iri, Iri], object] = {}
    for event in events:
        triples = build_triples(event, base)
        description = Iri((base or SITU) + event.description_id)
        for t in sorted(triples, key=lambda t: (t.subject.value, t.predicate.value)):
            if t.predicate in _SINGLE or (t.predicate == RDFS_COMMENT and t.subject == description):
                key = (t.subject, t.predicate)
                previous = seen.setdefault(key, t.object)
                if previous != t.object:
                    what = "lexical entry name" if t.predicate == RDFS_LABEL else t.predicate.value.rsplit("#", 1)[-1]
                    raise ConflictError(
                        t.subject.value,
                        f"conflicting {what}: {_show(previous)} vs {_show(t.object)}",
                    )
        graph.update(triples)
    return graph


def _show(term) -> str:
    return repr(term.lexical) if isinstance(term, Literal) else f"<{term.value}>"


# -- event files -------------------------------------------------------------


def parse_events(lines: Iterable[str]) -> list[AnnotationEvent]:
    """Parse JSON Lines text; blank lines are skipped.

    Raises one :class:`EventError` listing every bad line.
    """
    events: list[AnnotationEvent] = []
    problems: list[tuple[int, str]] = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line, parse_float=Decimal)
            events.append(AnnotationEvent.from_dict(record))
        except json.JSONDecodeError as exc:
            problems.append((number, f"invalid JSON: {exc.msg}"))
        except (EventError, TypeError) as exc:
            problems.append((number, str(exc)))
    if problems:
        message = "\n".join(f"line {n}: {msg}" for n, msg in problems)
        raise EventError(message, tuple(n for n, _ in problems))
    return events


def read_events(path: Union[str, Path]) -> list[AnnotationEvent]:
    with open(path, encoding="utf-8") as fh:
        return parse_events(fh)
