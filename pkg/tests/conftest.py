import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from situkg import load_turtle, materialize_inference  # noqa: E402

DATA = Path(str(resources.files("situkg") / "data"))
FIXTURE_FILES = [DATA / "images_kg.ttl", DATA / "situations_kg.ttl"]
EVENTS_FILE = DATA / "events.jsonl"

# filled by test_acceptance, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def fixture_paths():
    return list(FIXTURE_FILES)


@pytest.fixture(scope="session")
def raw_graph():
    return load_turtle(FIXTURE_FILES).freeze()


@pytest.fixture(scope="session")
def fixture_graph(raw_graph):
    g = materialize_inference(raw_graph)
    g.prefixes = raw_graph.prefixes
    return g.freeze()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
