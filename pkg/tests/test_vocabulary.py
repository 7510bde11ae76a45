import random

import pytest

from situkg.graph import Graph, Triple
from situkg.terms import (
    DUL,
    RDF_TYPE,
    RDFS_SUBCLASSOF,
    SITU,
    XSD_DATE,
    XSD_DECIMAL,
    Iri,
    Literal,
)
from situkg.vocabulary import (
    ANNOTATION_KINDS,
    ClassDef,
    OntologySchema,
    PropertyDef,
    builtin_schema,
    materialize_inference,
    validate,
)


def s(x):
    return Iri(SITU + x)


SCHEMA = builtin_schema()


def _reachable(schema, cls):
    """Depth-first search over the declared direct links only."""
    seen, stack = set(), [cls]
    while stack:
        for sup in schema.classes[stack.pop()].superclasses:
            if sup not in seen:
                seen.add(sup)
                stack.append(sup)
    return seen


def test_schema_closure_matches_brute_force_reachability():
    for cls in SCHEMA.classes:
        assert SCHEMA.superclasses(cls) == _reachable(SCHEMA, cls), cls


def test_core_schema_entries():
    assert s("Annotation") in SCHEMA.superclasses(s("ArtStyleAnnotation"))
    assert s("Annotator") in SCHEMA.superclasses(s("ArtificialAnnotator"))
    assert SCHEMA.superclasses(s("IndividualHumanAnnotator")) == {s("HumanAnnotator"), s("Annotator")}
    assert Iri(DUL + "Situation") in SCHEMA.superclasses(s("ArtStyleAnnotationSituation"))
    for kind in ANNOTATION_KINDS:
        assert SCHEMA.known_class(s(f"{kind}Annotation"))
        assert s("ImageAnnotationSituation") in SCHEMA.superclasses(s(f"{kind}AnnotationSituation"))
    assert (s("involvesAnnotation"), s("isAnnotationInvolvedInSituation")) in SCHEMA.inverse_pairs
    assert (s("involvesAnnotatedEntity"), s("isInvolvedInAnnotationSituation")) in SCHEMA.inverse_pairs


def test_schema_declares_every_listed_property():
    names = """atPlace onDate involvesAnnotator involvesDataset involvesRemunerationScheme hasDetectionThreshold
    satisfies involvesAnnotation aboutAnnotatedEntity annotationWithLexicalEntry isClassifiedBy typedByConcept
    hasAnnotationStrength isAnnotationInvolvedInSituation hasModelArchitecture pretrainedOnDataset hasCoordinate
    isInvolvedInAnnotationSituation involvesAnnotatedEntity hasImageLabelTypedBy isAnnotatedWithLexicalEntry
    defines hasPoliticalAffiliation hasPredominantPoliticalAffiliation hasReligiousAffiliation
    hasIndigenousAffiliation""".split()
    for name in names:
        assert s(name) in SCHEMA.properties, name


def test_schema_rejects_cycles_and_asymmetric_inverses():
    a, b = s("A"), s("B")
    with pytest.raises(ValueError, match="cycle"):
        OntologySchema({a: ClassDef(a, frozenset({b})), b: ClassDef(b, frozenset({a}))}, {}, [])
    p, q = s("p"), s("q")
    with pytest.raises(ValueError, match="symmetric"):
        OntologySchema({}, {p: PropertyDef(p, inverse=q), q: PropertyDef(q)}, [(p, q)])


def test_materialization_adds_supertypes_links_and_inverses():
    x, sit, img = s("x"), s("ARTstract_as_2023_06_26"), s("ARTstract_14978")
    g = Graph([
        Triple(x, RDF_TYPE, s("ArtStyleAnnotation")),
        Triple(sit, s("involvesAnnotatedEntity"), img),
        Triple(x, s("hasAnnotationStrength"), Literal("0.5", XSD_DECIMAL)),
    ])
    m = materialize_inference(g)
    assert Triple(x, RDF_TYPE, s("Annotation")) in m
    assert Triple(img, s("isInvolvedInAnnotationSituation"), sit) in m
    assert Triple(s("ArtStyleAnnotation"), RDFS_SUBCLASSOF, s("Annotation")) in m
    assert Triple(s("IndividualHumanAnnotator"), RDFS_SUBCLASSOF, s("Annotator")) in m
    assert len(g) == 3  # input untouched


def test_unknown_classes_pass_through():
    g = Graph([Triple(s("x"), RDF_TYPE, Iri("http://example.org/Thing"))])
    m = materialize_inference(g)
    assert [t for t in m if t.subject == s("x")] == list(g)


def _random_instance_graph(rng):
    classes = list(SCHEMA.classes)
    nodes = [s(f"n{i}") for i in range(6)]
    props = [s("involvesAnnotation"), s("isAnnotationInvolvedInSituation"), s("involvesAnnotatedEntity"),
             s("isInvolvedInAnnotationSituation"), s("atPlace")]
    g = Graph()
    for _ in range(rng.randint(0, 25)):
        if rng.random() < 0.4:
            g.add(Triple(rng.choice(nodes), RDF_TYPE, rng.choice(classes)))
        else:
            g.add(Triple(rng.choice(nodes), rng.choice(props), rng.choice(nodes + [Literal("v")])))
    return g


def test_materialization_monotone_idempotent_and_order_independent():
    rng = random.Random(11)
    for _ in range(60):
        g = _random_instance_graph(rng)
        m = materialize_inference(g)
        assert all(t in m for t in g)
        assert materialize_inference(m) == m
        shuffled = list(g)
        rng.shuffle(shuffled)
        assert materialize_inference(Graph(shuffled)) == m


def test_fixture_materialization_is_idempotent(fixture_graph):
    assert len(materialize_inference(fixture_graph)) == len(fixture_graph)


# -- validation --------------------------------------------------------------


def test_clean_fixture_has_no_findings(fixture_graph):
    report = validate(fixture_graph)
    assert report.errors == [] and report.warnings == []
    assert report.render_text() == "0 errors, 0 warnings"


def _mutated(graph, drop=(), add=()):
    g = Graph((t for t in graph if t not in set(drop)), graph.prefixes)
    g.update(add)
    return materialize_inference(g)


AS_ANN = s("14978_ARTstract_as_2023_06_26")
AS_SIT = s("ARTstract_as_2023_06_26")


def test_strength_out_of_range_gives_exactly_one_error(raw_graph):
    old = Triple(AS_ANN, s("hasAnnotationStrength"), Literal("0.6149182915687561", XSD_DECIMAL))
    new = Triple(AS_ANN, s("hasAnnotationStrength"), Literal("1.5", XSD_DECIMAL))
    report = validate(_mutated(raw_graph, [old], [new]))
    assert [(f.code, f.focus) for f in report.errors] == [("STRENGTH_RANGE", AS_ANN)]


def test_missing_about_entity_gives_one_annotation_shape_error(raw_graph):
    old = Triple(AS_ANN, s("aboutAnnotatedEntity"), s("ARTstract_14978"))
    report = validate(_mutated(raw_graph, [old]))
    assert [(f.code, f.focus) for f in report.errors] == [("ANNOTATION_SHAPE", AS_ANN)]


def test_severities_and_codes():
    x, sit = s("x"), s("sit")
    g = Graph([
        Triple(sit, RDF_TYPE, s("AnnotationSituation")),
        Triple(sit, s("onDate"), Literal("26/06/2023", XSD_DATE)),
        Triple(sit, s("satisfies"), s("notADescription")),
        Triple(sit, s("atPlace"), Literal("Italy")),
        Triple(x, RDF_TYPE, s("Annotator")),
        Triple(x, s("hasAnnotationStrength"), Literal("high")),
        Triple(x, s("hasCoordinate"), Literal("1,2,3")),
        Triple(sit, s("involvesAnnotator"), s("place")),
        Triple(s("place"), RDF_TYPE, s("Place")),
    ])
    report = validate(g)
    by_code = {}
    for f in report.findings:
        by_code.setdefault(f.code, set()).add(f.severity)
    assert by_code["DATE_FORM"] == {"error"}
    assert by_code["DANGLING_REF"] == {"error"}
    assert by_code["STRENGTH_RANGE"] == {"error"}
    assert by_code["SITUATION_SHAPE"] == {"warning", "error"}
    assert by_code["COORDINATE_FORM"] == {"warning"}
    assert by_code["DOMAIN"] == {"warning"}
    assert by_code["RANGE"] == {"warning"}
    assert report.as_dict()["errors"] == len(report.errors)


def test_caption_annotation_may_use_comment_instead_of_lexical_entry(fixture_graph):
    caption = s("14978_ARTstract_ic_2023_06_28")
    assert Triple(caption, RDF_TYPE, s("ImageCaptionAnnotation")) in fixture_graph
    assert not fixture_graph.match(caption, s("annotationWithLexicalEntry"), None)
    assert not [f for f in validate(fixture_graph).findings if f.focus == caption]


def test_inference_only_removes_annotation_shape_findings():
    rng = random.Random(5)
    for _ in range(60):
        g = _random_instance_graph(rng)
        before = {(f.code, f.focus) for f in validate(g).findings if f.code == "ANNOTATION_SHAPE"}
        after = {(f.code, f.focus) for f in validate(materialize_inference(g)).findings
                 if f.code == "ANNOTATION_SHAPE"}
        assert after <= before


def test_finding_rendering():
    g = Graph([Triple(s("a"), s("onDate"), Literal("x", XSD_DATE))])
    line = validate(g).findings[0].render()
    assert line.startswith("ERROR DATE_FORM <https://w3id.org/situannotate#a> ")
