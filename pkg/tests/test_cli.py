import json

import pytest
from click.testing import CliRunner

from conftest import EVENTS_FILE, FIXTURE_FILES
from situkg.cli import main
from situkg.turtle import load_turtle, parse_turtle

INPUTS = [str(p) for p in FIXTURE_FILES]


@pytest.fixture
def cli():
    runner = CliRunner()

    def call(*args, env=None):
        return runner.invoke(main, list(args), env=env, catch_exceptions=False)

    return call


@pytest.fixture
def broken_strength(tmp_path):
    text = FIXTURE_FILES[0].read_text().replace("0.6149182915687561", "1.5")
    path = tmp_path / "images_bad.ttl"
    path.write_text(text)
    return [str(path), INPUTS[1]]


def test_validate_clean_fixture(cli):
    res = cli("validate", *INPUTS)
    assert res.exit_code == 0
    assert res.stdout.strip() == "0 errors, 0 warnings"
    # no inputs means the bundled dataset
    assert cli("validate").stdout == res.stdout


def test_validate_without_inference_only_warns(cli):
    res = cli("validate", "--no-inference", *INPUTS)
    assert res.exit_code == 0
    assert "0 errors, 8 warnings" in res.stdout
    assert cli("validate", "--no-inference", "--strict", *INPUTS).exit_code == 1


def test_validate_reports_seeded_error(cli, broken_strength):
    res = cli("validate", *broken_strength)
    assert res.exit_code == 1
    assert "STRENGTH_RANGE" in res.stdout and "14978_ARTstract_as_2023_06_26" in res.stdout
    report = json.loads(cli("validate", "--format", "json", *broken_strength).stdout)
    assert report["errors"] == 1 and report["findings"][0]["code"] == "STRENGTH_RANGE"
    tsv = cli("validate", "--format", "tsv", *broken_strength).stdout.splitlines()
    assert tsv[0] == "severity\tcode\tfocus\tmessage" and tsv[1].startswith("error\tSTRENGTH_RANGE\t")


def test_io_and_parse_failures_exit_2(cli, tmp_path):
    res = cli("validate", str(tmp_path / "missing.ttl"))
    assert res.exit_code == 2 and res.stderr.startswith("error: cannot read")
    bad = tmp_path / "bad.ttl"
    bad.write_text("@prefix : <http://x/> .\n:a :b .\n")
    res = cli("stats", str(bad))
    assert res.exit_code == 2 and "parse errors" in res.stderr and "2:" in res.stderr


def test_query_cq1_table(cli):
    res = cli("query", "--cq", "1", *INPUTS)
    assert res.exit_code == 0
    lines = res.stdout.splitlines()
    assert lines[0].split() == ["?Country", "?count"]
    assert set(lines[1].replace(" ", "")) == {"-"}
    assert lines[2].split() == [":Italy", "5"]
    assert lines[3].split() == [":Netherlands", "3"]


def test_query_cq11_tsv_and_text(cli):
    res = cli("query", "--cq", "11", "--format", "tsv", *INPUTS)
    assert res.exit_code == 0
    assert "painting of children playing in the water at the beach" in res.stdout
    assert not res.stdout.splitlines()[0].startswith("?")
    text = cli("query", "--cq", "11", "--format", "text", *INPUTS).stdout
    assert text.rstrip().endswith("solution(s)")


def test_query_usage_errors(cli, tmp_path):
    assert cli("query", "--cq", "12").exit_code == 2
    assert cli("query").exit_code == 2
    q = tmp_path / "q.rq"
    q.write_text("SELECT ?x WHERE { ?x :p }")
    res = cli("query", "--query", str(q))
    assert res.exit_code == 2 and res.stderr.startswith("error: query:")


def test_query_file_with_params(cli, tmp_path):
    q = tmp_path / "q.rq"
    q.write_text("SELECT ?place WHERE { :{{sit}} :atPlace ?place }")
    res = cli("query", "--query", str(q), "--param", "sit=ARTstract_od_2023_06_28", "--format", "tsv")
    assert res.stdout == "place\n:Netherlands\n"
    missing = cli("query", "--query", str(q))
    assert missing.exit_code == 2 and "sit" in missing.stderr
    assert cli("query", "--query", str(q), "--param", "oops").exit_code == 2


def test_cq10_needs_inference(cli):
    with_inf = cli("query", "--cq", "10", "--format", "tsv", *INPUTS).stdout.splitlines()
    without = cli("query", "--cq", "10", "--format", "tsv", "--no-inference", *INPUTS).stdout.splitlines()
    assert len(with_inf) > 1 and len(without) == 1


def test_explain(cli):
    res = cli("explain", "--entity", "ARTstract_14978", "--label", "impressionism", *INPUTS)
    assert res.exit_code == 0
    for piece in ("impressionism", "ARTstract_14978", "2023-06-26", "Italy", "visual_transformer",
                  "artbench-10", "0.6149182915687561"):
        assert piece in res.stdout
    none = cli("explain", "--entity", "ARTstract_14978", "--label", "no-such-label")
    assert none.exit_code == 0 and none.stdout == "" and "no annotation found" in none.stderr
    bad = cli("explain", "--entity", "ARTstract_14978", "--label", 'x" } #')
    assert bad.exit_code == 2 and "rejected input" in bad.stderr


def test_build_fixture_events(cli, tmp_path):
    out = tmp_path / "kg.ttl"
    res = cli("build", str(EVENTS_FILE), "-o", str(out))
    assert res.exit_code == 0
    graph, _ = parse_turtle(out.read_text())
    assert res.stdout.strip() == f"{len(graph)} triples"
    valid = cli("validate", str(out))
    assert valid.exit_code == 0 and valid.stdout.strip() == "0 errors, 0 warnings"
    to_stdout = cli("build", str(EVENTS_FILE))
    assert to_stdout.stdout == out.read_text() and "triples" in to_stdout.stderr


def test_build_errors(cli, tmp_path):
    lines = EVENTS_FILE.read_text().splitlines()
    bad = tmp_path / "bad.jsonl"
    bad.write_text("\n".join([lines[0], lines[1], "{ malformed", lines[2]]) + "\n")
    res = cli("build", str(bad))
    assert res.exit_code == 1 and "line 3:" in res.stderr
    clash = tmp_path / "clash.jsonl"
    clash.write_text(lines[0] + "\n" + lines[0].replace("2023-06-26", "2023-06-27") + "\n")
    res = cli("build", str(clash))
    assert res.exit_code == 1 and "conflicting" in res.stderr and "ARTstract_as_2023_06_26" in res.stderr
    assert cli("build", str(tmp_path / "nope.jsonl")).exit_code == 2


def test_build_empty_file_gives_prefix_header_only(cli, tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    res = cli("build", str(empty))
    assert res.exit_code == 0
    body = [ln for ln in res.stdout.splitlines() if ln.strip()]
    assert body and all(ln.startswith("@prefix") for ln in body)
    assert "0 triples" in res.stderr


def test_stats(cli, tmp_path):
    res = cli("stats", *INPUTS)
    counts = {k: int(v) for k, v in (ln.split() for ln in res.stdout.splitlines())}
    assert counts == {"triples": 352, "subjects": 72, "Annotation": 11, "AnnotationSituation": 8,
                      "Annotator": 8, "Image": 1, "lexical_entries": 10}
    raw = {k: int(v) for k, v in (ln.split() for ln in cli("stats", "--no-inference", *INPUTS).stdout.splitlines())}
    assert raw["triples"] == len(load_turtle(FIXTURE_FILES)) and raw["Annotation"] == 11
    empty = tmp_path / "empty.ttl"
    empty.write_text("")
    zeros = cli("stats", "--no-inference", str(empty)).stdout.split()
    assert zeros[1::2] == ["0"] * 7
    # inference still asserts the schema's own subclass links
    inferred = cli("stats", str(empty)).stdout.split()
    assert int(inferred[1]) > 0 and inferred[5::2] == ["0"] * 5


def test_infer_output_is_materialized(cli, tmp_path):
    out = tmp_path / "inf.ttl"
    assert cli("infer", *INPUTS, "-o", str(out)).exit_code == 0
    assert len(parse_turtle(out.read_text())[0]) == 352


def test_outputs_are_deterministic(cli):
    for args in (["query", "--cq", "6"], ["infer"], ["build", str(EVENTS_FILE)], ["validate", "--format", "json"]):
        assert cli(*args).stdout == cli(*args).stdout


def test_prefix_environment_variable(cli, tmp_path):
    env = {"SITUKG_PREFIX": "http://example.org/inst/"}
    res = cli("build", str(EVENTS_FILE), env=env)
    graph, prefixes = parse_turtle(res.stdout)
    assert prefixes[""] == "http://example.org/inst/"
    assert any(t.subject.value == "http://example.org/inst/ARTstract_14978" for t in graph)
    assert all(t.predicate.value.startswith(("https://w3id.org/situannotate#", "http://www.w3.org/")) for t in graph)
    # turtle without its own ':' declaration is read in the configured namespace
    doc = tmp_path / "local.ttl"
    doc.write_text("@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n"
                   "@prefix situ: <https://w3id.org/situannotate#> .\n"
                   ':s1 situ:onDate "2024-13-01"^^xsd:date .\n')
    res = cli("validate", "--format", "json", str(doc), env=env)
    assert json.loads(res.stdout)["findings"][0]["focus"] == "http://example.org/inst/s1"


def test_version_and_help(cli):
    assert cli("--version").exit_code == 0
    res = cli("--help")
    for name in ("validate", "query", "explain", "build", "stats", "infer"):
        assert name in res.stdout
