"""The SituAnnotate / Image Annotation Situation schema, inference and validation."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cache
from typing import Iterable, Optional

from situkg.graph import Graph, Triple
from situkg.terms import (
    DUL,
    RDF_TYPE,
    RDFS_COMMENT,
    RDFS_SUBCLASSOF,
    SITU,
    XSD_DATE,
    XSD_DECIMAL,
    XSD_STRING,
    Iri,
    Literal,
    Term,
    date_value,
    numeric_value,
)

# class local name -> direct superclasses; "dul:" entries are DUL IRIs
_CLASSES: dict[str, tuple[str, ...]] = {
    "Annotation": (),
    "AnnotationSituation": ("dul:Situation",),
    "AnnotationDescription": ("dul:Description",),
    "AnnotationRole": ("dul:Role",),
    "Annotator": (),
    "ArtificialAnnotator": ("Annotator",),
    "HumanAnnotator": ("Annotator",),
    "IndividualHumanAnnotator": ("HumanAnnotator",),
    "HumanAnnotatorCommunity": ("HumanAnnotator",),
    "AnnotatedEntity": (),
    "Image": ("AnnotatedEntity",),
    "LexicalEntry": (),
    "Place": (),
    "Dataset": (),
    "RemunerationScheme": (),
    "ModelArchitecture": (),
    "ImageAnnotationSituation": ("AnnotationSituation",),
    "ImageAnnotationDescription": ("AnnotationDescription",),
}

# image annotation kinds; each yields <Kind>Annotation and <Kind>AnnotationSituation
ANNOTATION_KINDS = (
    "Action", "Age", "ArtStyle", "Color", "Emotion", "HumanPresence", "ImageCaption", "Object",
)
for _kind in ANNOTATION_KINDS:
    _CLASSES[f"{_kind}Annotation"] = ("Annotation",)
    _CLASSES[f"{_kind}AnnotationSituation"] = ("ImageAnnotationSituation",)

_INVERSES = (
    ("involvesAnnotation", "isAnnotationInvolvedInSituation"),
    ("involvesAnnotatedEntity", "isInvolvedInAnnotationSituation"),
)

# local name -> (domain classes, range kind, range class or datatype, at-least-one)
_PROPERTIES: dict[str, tuple[tuple[str, ...], str, Optional[str], bool]] = {
    # situation context
    "atPlace": (("AnnotationSituation",), "resource", "Place", False),
    "onDate": (("AnnotationSituation",), "literal", XSD_DATE, False),
    "involvesAnnotator": (("AnnotationSituation",), "resource", "Annotator", False),
    "involvesDataset": (("AnnotationSituation",), "resource", "Dataset", False),
    "involvesRemunerationScheme": (("AnnotationSituation",), "resource", "RemunerationScheme", False),
    "hasDetectionThreshold": (("AnnotationSituation",), "literal", None, False),
    "satisfies": (("AnnotationSituation",), "resource", "AnnotationDescription", False),
    "involvesAnnotation": (("AnnotationSituation",), "resource", "Annotation", True),
    "involvesAnnotatedEntity": (("AnnotationSituation",), "resource", "AnnotatedEntity", False),
    "defines": (("AnnotationDescription",), "resource", "AnnotationRole", False),
    # annotation
    "aboutAnnotatedEntity": (("Annotation",), "resource", "AnnotatedEntity", True),
    "annotationWithLexicalEntry": (("Annotation",), "resource", "LexicalEntry", True),
    "isClassifiedBy": (("Annotation",), "resource", "AnnotationRole", False),
    "typedByConcept": (("Annotation",), "resource", None, False),
    "hasAnnotationStrength": (("Annotation",), "literal", XSD_DECIMAL, False),
    "isAnnotationInvolvedInSituation": (("Annotation",), "resource", "AnnotationSituation", True),
    "hasCoordinate": (("Annotation",), "literal", XSD_STRING, False),
    # annotated entity shortcuts
    "isInvolvedInAnnotationSituation": (("AnnotatedEntity",), "resource", "AnnotationSituation", False),
    "hasImageLabelTypedBy": (("Image",), "resource", None, False),
    "isAnnotatedWithLexicalEntry": (("Image",), "resource", "LexicalEntry", False),
    # annotators
    "hasModelArchitecture": (("ArtificialAnnotator",), "resource", "ModelArchitecture", False),
    "pretrainedOnDataset": (("ArtificialAnnotator",), "resource", "Dataset", False),
}

# demographic attribute key -> (individual property, community "predominant" property)
DEMOGRAPHICS: dict[str, tuple[str, str]] = {
    "political_affiliation": ("hasPoliticalAffiliation", "hasPredominantPoliticalAffiliation"),
    "religious_affiliation": ("hasReligiousAffiliation", "hasPredominantReligiousAffiliation"),
    "indigenous_affiliation": ("hasIndigenousAffiliation", "hasPredominantIndigenousAffiliation"),
    "country_of_upbringing": ("hasCountryOfUpbringing", "hasPredominantCountryOfUpbringing"),
}
for _individual, _community in DEMOGRAPHICS.values():
    _PROPERTIES[_individual] = (("HumanAnnotator",), "resource", None, False)
    _PROPERTIES[_community] = (("HumanAnnotatorCommunity",), "resource", None, False)


def _class_iri(name: str) -> Iri:
    if name.startswith("dul:"):
        return Iri(DUL + name[4:])
    return Iri(SITU + name)


@dataclass(frozen=True)
class ClassDef:
    iri: Iri
    superclasses: frozenset[Iri] = frozenset()


@dataclass(frozen=True)
class PropertyDef:
    iri: Iri
    domain: frozenset[Iri] = frozenset()
    range_kind: str = "any"  # "resource" | "literal" | "any"
    range_class: Optional[Iri] = None
    datatype: Optional[str] = None
    inverse: Optional[Iri] = None
    required: bool = False


@dataclass
class OntologySchema:
    classes: dict[Iri, ClassDef]
    properties: dict[Iri, PropertyDef]
    inverse_pairs: list[tuple[Iri, Iri]]
    _closure: dict[Iri, frozenset[Iri]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for a, b in self.inverse_pairs:
            if a not in self.properties or b not in self.properties:
                raise ValueError(f"inverse pair references undeclared property: {a}, {b}")
            if self.properties[a].inverse != b or self.properties[b].inverse != a:
                raise ValueError(f"inverse declaration is not symmetric: {a}, {b}")
        for cls in self.classes:
            self.superclasses(cls)

    def superclasses(self, cls: Iri) -> frozenset[Iri]:
        """Strict transitive superclasses of ``cls`` (empty for unknown classes)."""
        if cls in self._closure:
            return self._closure[cls]
        result: set[Iri] = set()

        def visit(c: Iri, path: tuple[Iri, ...]) -> None:
            definition = self.classes.get(c)
            if definition is None:
                return
            for sup in definition.superclasses:
                if sup in path:
                    raise ValueError(f"subclass cycle through {sup.value}")
                result.add(sup)
                visit(sup, path + (sup,))

        visit(cls, (cls,))
        self._closure[cls] = frozenset(result)
        return self._closure[cls]

    def is_a(self, types: Iterable[Iri], cls: Iri) -> bool:
        return any(t == cls or cls in self.superclasses(t) for t in types)

    def known_class(self, cls: Iri) -> bool:
        return cls in self.classes

    def subclass_links(self) -> list[tuple[Iri, Iri]]:
        """(sub, super) for every class and every superclass in its closure."""
        return [(c, s) for c in self.classes for s in sorted(self.superclasses(c), key=lambda i: i.value)]


@cache
def builtin_schema() -> OntologySchema:
    classes: dict[Iri, ClassDef] = {}
    for name, supers in _CLASSES.items():
        classes[_class_iri(name)] = ClassDef(_class_iri(name), frozenset(_class_iri(s) for s in supers))
        for s in supers:
            classes.setdefault(_class_iri(s), ClassDef(_class_iri(s)))
    inverse_of: dict[str, str] = {}
    for a, b in _INVERSES:
        inverse_of[a], inverse_of[b] = b, a
    properties: dict[Iri, PropertyDef] = {}
    for name, (domain, kind, target, required) in _PROPERTIES.items():
        properties[_class_iri(name)] = PropertyDef(
            iri=_class_iri(name),
            domain=frozenset(_class_iri(d) for d in domain),
            range_kind=kind,
            range_class=_class_iri(target) if kind == "resource" and target else None,
            datatype=target if kind == "literal" else None,
            inverse=_class_iri(inverse_of[name]) if name in inverse_of else None,
            required=required,
        )
    pairs = [(_class_iri(a), _class_iri(b)) for a, b in _INVERSES]
    return OntologySchema(classes, properties, pairs)


# -- inference ---------------------------------------------------------------


def materialize_inference(graph: Graph, schema: Optional[OntologySchema] = None) -> Graph:
    """Return a new graph closed under schema subclassing and declared inverses.

    Adds the schema's subClassOf closure as triples, every superclass type of
    each typed node, and the missing half of each inverse-property pair
    (skipping literal objects, which cannot become subjects).
    """
    schema = schema or builtin_schema()
    out = graph.copy()
    for sub, sup in schema.subclass_links():
        out.add(Triple(sub, RDFS_SUBCLASSOF, sup))
    inverse = {}
    for a, b in schema.inverse_pairs:
        inverse[a], inverse[b] = b, a

    pending = list(out)
    while pending:
        derived: list[Triple] = []
        for t in pending:
            if t.predicate == RDF_TYPE and isinstance(t.object, Iri):
                for sup in schema.superclasses(t.object):
                    derived.append(Triple(t.subject, RDF_TYPE, sup))
            other = inverse.get(t.predicate)
            if other is not None and not isinstance(t.object, Literal):
                derived.append(Triple(t.object, other, t.subject))
        pending = [t for t in derived if out.add(t)]
    return out


# -- validation --------------------------------------------------------------


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning"
    code: str
    focus: Term
    message: str

    def render(self) -> str:
        return f"{self.severity.upper()} {self.code} {self.focus} - {self.message}"

    def as_dict(self) -> dict:
        focus = self.focus.value if isinstance(self.focus, Iri) else str(self.focus)
        return {"severity": self.severity, "code": self.code, "focus": focus, "message": self.message}


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.findings

    def codes(self) -> set[str]:
        return {f.code for f in self.findings}

    def render_text(self) -> str:
        lines = [f.render() for f in self.findings]
        lines.append(f"{len(self.errors)} errors, {len(self.warnings)} warnings")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "errors": len(self.errors),
            "warnings": len(self.warnings),
            "findings": [f.as_dict() for f in self.findings],
        }


_COORDINATE = re.compile(r"\s*\d+(\.\d+)?\s*(,\s*\d+(\.\d+)?\s*){3}")
_REF_PROPERTIES = ("involvesAnnotator", "involvesDataset", "atPlace")


def _s(local: str) -> Iri:
    return Iri(SITU + local)


def validate(graph: Graph, schema: Optional[OntologySchema] = None) -> ValidationReport:
    """Check ``graph`` against the schema constraints; never raises.

    Class membership is computed through the schema's subclass closure, so
    findings do not depend on whether type inference already ran.
    """
    schema = schema or builtin_schema()
    findings: list[Finding] = []

    def err(code, focus, message):
        findings.append(Finding("error", code, focus, message))

    def warn(code, focus, message):
        findings.append(Finding("warning", code, focus, message))

    types: dict[Term, list[Iri]] = {}
    for t in graph.match(None, RDF_TYPE, None):
        if isinstance(t.object, Iri):
            types.setdefault(t.subject, []).append(t.object)

    def is_a(node: Term, cls: Iri) -> bool:
        return schema.is_a(types.get(node, ()), cls)

    for t in graph.match(None, _s("hasAnnotationStrength"), None):
        value = numeric_value(t.object)
        if value is None:
            err("STRENGTH_RANGE", t.subject, f"annotation strength {_show(t.object)} is not numeric")
        elif not 0 <= value <= 1:
            err("STRENGTH_RANGE", t.subject, f"annotation strength {_show(t.object)} is outside [0, 1]")

    for t in graph.match(None, _s("onDate"), None):
        if date_value(t.object) is None:
            err("DATE_FORM", t.subject, f"onDate value {_show(t.object)} is not an xsd:date")

    annotation = _s("Annotation")
    caption = _s("ImageCaptionAnnotation")
    situation = _s("AnnotationSituation")
    required = [p for p in schema.properties.values() if p.required]
    subjects = list(types)
    for node in subjects:
        if is_a(node, annotation):
            for prop in required:
                if annotation not in prop.domain or graph.match(node, prop.iri, None):
                    continue
                # captions carry their text as rdfs:comment instead of a lexical entry
                if prop.iri == _s("annotationWithLexicalEntry") and is_a(node, caption) \
                        and graph.match(node, RDFS_COMMENT, None):
                    continue
                err("ANNOTATION_SHAPE", node, f"annotation lacks :{_local(prop.iri)}")
        if is_a(node, situation):
            for prop in required:
                if situation in prop.domain and not graph.match(node, prop.iri, None):
                    warn("SITUATION_SHAPE", node, f"situation lacks :{_local(prop.iri)}")

    description = _s("AnnotationDescription")
    for t in graph.match(None, _s("satisfies"), None):
        if not is_a(t.object, description):
            err("SITUATION_SHAPE", t.subject,
                f"satisfies target {_show(t.object)} is not an AnnotationDescription")

    for local in _REF_PROPERTIES:
        for t in graph.match(None, _s(local), None):
            if isinstance(t.object, Literal):
                err("DANGLING_REF", t.subject, f":{local} points at literal {_show(t.object)}, not a node")

    for t in graph.match(None, _s("hasCoordinate"), None):
        if not (isinstance(t.object, Literal) and _COORDINATE.fullmatch(t.object.lexical)):
            warn("COORDINATE_FORM", t.subject,
                 f"coordinate {_show(t.object)} is not 'x,y,w,h' with non-negative numbers")

    for t in graph:
        prop = schema.properties.get(t.predicate)
        if prop is None:
            continue
        if prop.domain and t.subject in types and not any(is_a(t.subject, d) for d in prop.domain):
            warn("DOMAIN", t.subject, f"subject of :{_local(prop.iri)} is not a "
                 + " or ".join(_local(d) for d in sorted(prop.domain, key=lambda i: i.value)))
        if prop.range_kind == "resource":
            if isinstance(t.object, Literal):
                if _local(prop.iri) not in _REF_PROPERTIES:
                    warn("RANGE", t.subject, f":{_local(prop.iri)} expects a node, got {_show(t.object)}")
            elif prop.range_class is not None and t.object in types \
                    and not is_a(t.object, prop.range_class):
                warn("RANGE", t.subject,
                     f"object {_show(t.object)} of :{_local(prop.iri)} is not a {_local(prop.range_class)}")
        elif prop.range_kind == "literal" and not isinstance(t.object, Literal):
            warn("RANGE", t.subject, f":{_local(prop.iri)} expects a literal, got {_show(t.object)}")

    return ValidationReport(findings)


def _local(i: Iri) -> str:
    v = i.value
    return v[max(v.rfind("#"), v.rfind("/")) + 1:]


def _show(term: Term) -> str:
    if isinstance(term, Literal):
        return repr(term.lexical)
    return str(term)
