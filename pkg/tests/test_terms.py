import datetime
from decimal import Decimal

import pytest

from situkg.errors import StructuralError, UnknownPrefixError
from situkg.terms import (
    CONCEPTNET,
    RDF_LANGSTRING,
    RDF_TYPE,
    SITU,
    XSD_DATE,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    BlankNode,
    Iri,
    Literal,
    PrefixMap,
    compare_terms,
    date_value,
    default_prefixes,
    expand_curie,
    local_name,
    numeric_value,
    term_sort_key,
)


def test_plain_literal_defaults_to_xsd_string():
    assert Literal("x").datatype == XSD_STRING


def test_language_tag_forces_langstring_and_lowercases():
    lit = Literal("chat", language="FR")
    assert lit.datatype == RDF_LANGSTRING
    assert lit.language == "fr"


@pytest.mark.parametrize("kwargs", [
    {"lexical": "x", "datatype": XSD_INTEGER, "language": "en"},
    {"lexical": "x", "datatype": RDF_LANGSTRING},
    {"lexical": "x", "language": ""},
    {"lexical": "x", "datatype": "integer"},
    {"lexical": 3},
])
def test_malformed_literals_rejected(kwargs):
    with pytest.raises(StructuralError):
        Literal(**kwargs)


@pytest.mark.parametrize("value", ["", "relative/path", "#frag", None])
def test_iri_must_be_absolute(value):
    with pytest.raises(StructuralError):
        Iri(value)


@pytest.mark.parametrize("label", ["", "a b", "x.", ".x"])
def test_blank_node_labels_validated(label):
    with pytest.raises(StructuralError):
        BlankNode(label)


def test_terms_are_hashable_values():
    assert {Iri(SITU + "a"), Iri(SITU + "a")} == {Iri(SITU + "a")}
    assert Literal("1", XSD_INTEGER) != Literal("1", XSD_DECIMAL)


def test_kind_order_blank_then_iri_then_literal():
    terms = [Literal("a"), Iri("http://x/a"), BlankNode("b")]
    ordered = sorted(terms, key=term_sort_key)
    assert [type(t) for t in ordered] == [BlankNode, Iri, Literal]


def test_numeric_literals_compare_by_value_across_datatypes():
    one = Literal("1", XSD_INTEGER)
    one_and_half = Literal("1.5", XSD_DECIMAL)
    two = Literal("2e0", XSD_DOUBLE)
    assert compare_terms(one, one_and_half) == -1
    assert compare_terms(one_and_half, two) == -1
    assert compare_terms(Literal("10", XSD_INTEGER), Literal("9", XSD_INTEGER)) == 1


def test_equal_values_with_distinct_spellings_still_totally_ordered():
    a, b = Literal("1.0", XSD_DECIMAL), Literal("1.00", XSD_DECIMAL)
    assert compare_terms(a, b) == -compare_terms(b, a) != 0


def test_dates_compare_in_calendar_order():
    assert compare_terms(Literal("2023-06-26", XSD_DATE), Literal("2023-06-28", XSD_DATE)) == -1
    assert compare_terms(Literal("999-01-01", XSD_DATE), Literal("2000-01-01", XSD_DATE)) in (-1, 1)


def test_value_helpers():
    assert numeric_value(Literal("0.6149182915687561", XSD_DECIMAL)) == Decimal("0.6149182915687561")
    assert numeric_value(Literal("abc", XSD_INTEGER)) is None
    assert numeric_value(Literal("1.5", XSD_INTEGER)) is None
    assert numeric_value(Literal("1")) is None
    assert date_value(Literal("2023-06-26", XSD_DATE)) == datetime.date(2023, 6, 26)
    assert date_value(Literal("2023-02-30", XSD_DATE)) is None
    assert date_value(Literal("2023-06-26")) is None


def test_local_name():
    assert local_name(Iri(SITU + "ARTstract_14978")) == "ARTstract_14978"
    assert local_name(Iri(CONCEPTNET + "impressionism")) == "impressionism"
    assert local_name(Literal("x")) == "x"


def test_prefix_expansion_and_shrinking():
    pm = default_prefixes()
    assert expand_curie(pm, ":Italy") == Iri(SITU + "Italy")
    assert expand_curie(pm, "a") == RDF_TYPE
    assert pm.shrink(SITU + "Italy") == ":Italy"
    assert pm.shrink(CONCEPTNET + "impressionism") == "conceptnet:impressionism"
    assert pm.shrink("http://nowhere.example/x") is None
    # a remainder that is not a valid local name stays unshrunk
    assert pm.shrink(SITU + "has space") is None


def test_unknown_prefix_raises():
    with pytest.raises(UnknownPrefixError) as info:
        expand_curie(default_prefixes(), "nope:x")
    assert info.value.prefix == "nope"


def test_shrink_prefers_longest_namespace_then_shortest_label():
    pm = PrefixMap({"long": "http://x.org/a/b/", "s": "http://x.org/a/", "t": "http://x.org/a/"})
    assert pm.shrink("http://x.org/a/b/c") == "long:c"
    assert pm.shrink("http://x.org/a/c") == "s:c"


def test_base_override_changes_only_default_prefix():
    pm = default_prefixes("http://example.org/inst/")
    assert pm[""] == "http://example.org/inst/"
    assert pm["conceptnet"] == CONCEPTNET
