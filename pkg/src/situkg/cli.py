"""Command-line interface: ``situkg validate|query|explain|build|stats|infer``.

Exit codes: 0 success, 1 domain failure (validation or event errors),
2 usage, I/O or parse failure.
"""

from __future__ import annotations

import json
import os
import sys
from contextlib import contextmanager
from importlib import resources
from pathlib import Path
from typing import Optional

import click

from situkg.builder import build_graph, read_events
from situkg.errors import (
    ConflictError,
    EventError,
    LabelInjectionError,
    MissingParameterError,
    QueryEvaluationError,
    QuerySyntaxError,
    TurtleSyntaxError,
)
from situkg.explain import explain as explain_label
from situkg.explain import render_narratives
from situkg.graph import Graph
from situkg.query import competency_query, evaluate, parse_query, substitute_params
from situkg.terms import RDF_TYPE, Iri, Literal, PrefixMap, Term, default_prefixes, situ
from situkg.turtle import load_turtle, serialize_turtle
from situkg.vocabulary import materialize_inference, validate as validate_graph

PREFIX_ENV = "SITUKG_PREFIX"
FIXTURE_FILES = ("images_kg.ttl", "situations_kg.ttl")


class Failure(Exception):
    """Abort with ``message`` on stderr and the given exit code."""

    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _base_prefixes() -> PrefixMap:
    return default_prefixes(os.environ.get(PREFIX_ENV) or None)


def _load(inputs: tuple[str, ...], no_inference: bool) -> Graph:
    prefixes = _base_prefixes()
    try:
        if inputs:
            graph = load_turtle(inputs, prefixes)
        else:
            data = resources.files("situkg") / "data"
            with resources.as_file(data) as folder:
                graph = load_turtle([Path(folder) / name for name in FIXTURE_FILES], prefixes)
    except OSError as exc:
        raise Failure(f"cannot read {exc.filename}: {exc.strerror}", 2) from None
    except TurtleSyntaxError as exc:
        raise Failure("parse errors:\n" + "\n".join(f"  {e}" for e in exc.errors), 2) from None
    if not no_inference:
        prefixes = graph.prefixes
        graph = materialize_inference(graph)
        graph.prefixes = prefixes
    return graph.freeze()


@contextmanager
def _sink(output: Optional[str]):
    if output is None:
        yield sys.stdout
        return
    try:
        fh = open(output, "w", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise Failure(f"cannot write {output}: {exc.strerror}", 2) from None
    with fh:
        yield fh


def _run(fn):
    """Translate :class:`Failure` into a message and exit code."""
    try:
        return fn()
    except Failure as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(exc.code)


inputs_argument = click.argument("inputs", nargs=-1, type=click.Path(dir_okay=False))
no_inference_option = click.option(
    "--no-inference", is_flag=True, help="Skip subclass and inverse-property materialization after loading."
)
output_option = click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write to this file instead of stdout.")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="situkg")
def main():
    """Load, validate, query and explain situated annotation graphs.

    Commands that take Turtle INPUTS fall back to the bundled toy dataset
    when none are given.
    """


# -- validate ----------------------------------------------------------------


@main.command()
@inputs_argument
@click.option("--format", "fmt", type=click.Choice(["text", "tsv", "json"]), default="text", show_default=True)
@click.option("--strict", is_flag=True, help="Treat warnings as failures.")
@no_inference_option
@output_option
def validate(inputs, fmt, strict, no_inference, output):
    """Check INPUTS against the schema constraints."""

    def go():
        report = validate_graph(_load(inputs, no_inference))
        with _sink(output) as out:
            if fmt == "json":
                out.write(json.dumps(report.as_dict(), indent=2) + "\n")
            elif fmt == "tsv":
                out.write("severity\tcode\tfocus\tmessage\n")
                for f in report.findings:
                    d = f.as_dict()
                    out.write(f"{d['severity']}\t{d['code']}\t{d['focus']}\t{d['message']}\n")
            else:
                out.write(report.render_text() + "\n")
        if report.errors or (strict and report.warnings):
            sys.exit(1)

    _run(go)


# -- query -------------------------------------------------------------------


def short_form(term: Optional[Term], prefixes: PrefixMap) -> str:
    """CURIE when a prefix matches, else ``<iri>``; literals by lexical form."""
    if term is None:
        return ""
    if isinstance(term, Literal):
        return term.lexical
    if isinstance(term, Iri):
        curie = prefixes.shrink(term.value)
        return curie if curie is not None else f"<{term.value}>"
    return f"_:{term.label}"


def render_solutions(solutions, prefixes: PrefixMap, fmt: str) -> str:
    header = list(solutions.variables)
    rows = [[short_form(t, prefixes) for t in row] for row in solutions.tuples()]
    if fmt == "tsv":
        clean = [[c.replace("\t", " ").replace("\n", " ") for c in r] for r in rows]
        return "".join("\t".join(r) + "\n" for r in [header] + clean)
    if fmt == "text":
        blocks = ["\n".join(f"?{v} = {c}" for v, c in zip(header, r) if c) for r in rows]
        body = "\n\n".join(blocks)
        return (body + "\n" if body else "") + f"{len(rows)} solution(s)\n"
    names = [f"?{v}" for v in header]
    widths = [max([len(n)] + [len(r[i]) for r in rows]) for i, n in enumerate(names)]

    def line(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    out = [line(names), line(["-" * w for w in widths])] + [line(r) for r in rows]
    return "\n".join(out) + "\n"


def _parse_params(pairs: tuple[str, ...]) -> dict[str, str]:
    params = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise click.BadParameter(f"expected name=value, got {pair!r}", param_hint="--param")
        params[name] = value
    return params


@main.command()
@inputs_argument
@click.option("--cq", type=click.IntRange(1, 11), help="Run bundled competency question N (1-11).")
@click.option("--query", "query_file", type=click.Path(dir_okay=False), help="Run the query in this file.")
@click.option("--param", "params", multiple=True, metavar="NAME=VALUE", help="Fill a {{NAME}} slot (repeatable).")
@click.option("--format", "fmt", type=click.Choice(["table", "tsv", "text"]), default="table", show_default=True)
@no_inference_option
@output_option
def query(inputs, cq, query_file, params, fmt, no_inference, output):
    """Evaluate a SELECT query over INPUTS."""
    if (cq is None) == (query_file is None):
        raise click.UsageError("give exactly one of --cq or --query")
    bindings = _parse_params(params)

    def go():
        if cq is not None:
            text = competency_query(cq)
        else:
            try:
                text = Path(query_file).read_text(encoding="utf-8")
            except OSError as exc:
                raise Failure(f"cannot read {query_file}: {exc.strerror}", 2) from None
        graph = _load(inputs, no_inference)
        try:
            parsed = parse_query(substitute_params(text, bindings), graph.prefixes)
            solutions = evaluate(graph, parsed)
        except (QuerySyntaxError, QueryEvaluationError, MissingParameterError) as exc:
            raise Failure(f"query: {exc}", 2) from None
        with _sink(output) as out:
            out.write(render_solutions(solutions, graph.prefixes, fmt))

    _run(go)


# -- explain -----------------------------------------------------------------


@main.command()
@inputs_argument
@click.option("--entity", required=True, help="Local name of the annotated entity, e.g. ARTstract_14978.")
@click.option("--label", required=True, help="Label text as stored in the lexical entry.")
@no_inference_option
@output_option
def explain(inputs, entity, label, no_inference, output):
    """Explain where, when and by whom LABEL was attached to ENTITY."""

    def go():
        graph = _load(inputs, no_inference)
        try:
            contexts = explain_label(graph, entity, label)
        except (LabelInjectionError, MissingParameterError) as exc:
            raise Failure(f"rejected input: {exc}", 2) from None
        except (QuerySyntaxError, QueryEvaluationError) as exc:
            raise Failure(f"query: {exc}", 2) from None
        if not contexts:
            click.echo("no annotation found", err=True)
            return
        with _sink(output) as out:
            out.write(render_narratives(contexts) + "\n")

    _run(go)


# -- build -------------------------------------------------------------------


@main.command()
@click.argument("event_file", type=click.Path(dir_okay=False))
@output_option
def build(event_file, output):
    """Build Turtle from a JSON Lines EVENT_FILE of annotation events."""

    def go():
        try:
            events = read_events(event_file)
        except OSError as exc:
            raise Failure(f"cannot read {event_file}: {exc.strerror}", 2) from None
        except EventError as exc:
            raise Failure(f"invalid events in {event_file}:\n{exc}", 1) from None
        base = os.environ.get(PREFIX_ENV) or None
        try:
            graph = build_graph(events, base)
        except ConflictError as exc:
            raise Failure(f"conflicting events: {exc}", 1) from None
        with _sink(output) as out:
            out.write(serialize_turtle(graph, _base_prefixes()))
        click.echo(f"{len(graph)} triples", err=output is None)

    _run(go)


# -- stats -------------------------------------------------------------------

CORE_CLASSES = ("Annotation", "AnnotationSituation", "Annotator", "Image")


def graph_stats(graph: Graph) -> dict[str, int]:
    """Counts reported by ``situkg stats``; class counts include subclass instances."""
    stats = {
        "triples": len(graph),
        "subjects": len({t.subject for t in graph}),
    }
    inferred = materialize_inference(graph)
    for name in CORE_CLASSES:
        stats[name] = len({t.subject for t in inferred.match(None, RDF_TYPE, situ(name))})
    entries = {t.object for t in graph.match(None, situ("annotationWithLexicalEntry"), None)}
    entries |= {t.object for t in graph.match(None, situ("isAnnotatedWithLexicalEntry"), None)}
    stats["lexical_entries"] = len(entries)
    return stats


@main.command()
@inputs_argument
@no_inference_option
@output_option
def stats(inputs, no_inference, output):
    """Print triple, subject, class-instance and lexical-entry counts."""

    def go():
        counts = graph_stats(_load(inputs, no_inference))
        width = max(len(k) for k in counts)
        with _sink(output) as out:
            for key, value in counts.items():
                out.write(f"{key.ljust(width)}  {value}\n")

    _run(go)


# -- infer -------------------------------------------------------------------


@main.command()
@inputs_argument
@output_option
def infer(inputs, output):
    """Write INPUTS with all inferred triples added, as Turtle."""

    def go():
        graph = _load(inputs, no_inference=False)
        with _sink(output) as out:
            out.write(serialize_turtle(graph, graph.prefixes))

    _run(go)


if __name__ == "__main__":
    main()
