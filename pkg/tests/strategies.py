"""Hypothesis strategies over the supported term space."""

from hypothesis import strategies as st

from situkg.graph import Graph, Triple
from situkg.terms import CONCEPTNET, SITU, XSD, BlankNode, Iri, Literal

_NAMESPACES = [SITU, CONCEPTNET, "http://example.org/x#", "urn:test:"]
_local = st.text(alphabet=st.sampled_from("abcXYZ019_-."), min_size=0, max_size=6)
_odd = st.text(alphabet=st.sampled_from('ab /#<>"{}|^`\\é'), min_size=1, max_size=5)

iris = st.one_of(
    st.builds(lambda ns, l: Iri(ns + l), st.sampled_from(_NAMESPACES), _local),
    st.builds(lambda l: Iri("http://odd.example/" + l), _odd),
)
_edge = st.sampled_from("aZ09_")
_inner = st.text(alphabet=st.sampled_from("bY1_-."), max_size=4)
# labels may contain dots, but never at either end
blanks = st.one_of(
    st.builds(BlankNode, _edge),
    st.builds(lambda a, m, b: BlankNode(a + m + b), _edge, _inner, st.sampled_from("c8_-")),
)
_text = st.text(st.characters(blacklist_categories=("Cs",)), max_size=8)
_numbers = st.one_of(
    st.builds(lambda i: Literal(str(i), XSD + "integer"), st.integers(-1000, 1000)),
    st.builds(lambda sign, i, f: Literal(f"{sign}{i}.{f}", XSD + "decimal"),
              st.sampled_from(["", "+", "-"]), st.sampled_from(["", "0", "12", "007"]), st.integers(0, 9999)),
    st.builds(lambda m, e: Literal(f"{m}e{e}", XSD + "double"), st.sampled_from(["1.5", "2.", "0.25"]),
              st.integers(-9, 9)),
    st.builds(lambda s: Literal(s, XSD + "integer"), st.sampled_from(["01", "+5", " 7", "x"])),
)
literals = st.one_of(
    st.builds(Literal, _text),
    st.builds(lambda t, l: Literal(t, language=l), _text, st.sampled_from(["en", "it", "en-gb"])),
    st.builds(lambda t: Literal(t, XSD + "date"), st.sampled_from(["2023-06-26", "1999-12-31", "not-a-date"])),
    st.builds(lambda t: Literal(t, XSD + "boolean"), st.sampled_from(["true", "false", "1"])),
    st.builds(lambda t, d: Literal(t, d.value), _text, iris),
    _numbers,
)
subjects = st.one_of(iris, blanks)
objects = st.one_of(iris, blanks, literals)
triples = st.builds(Triple, subjects, iris, objects)
graphs = st.builds(Graph, st.lists(triples, max_size=25))
