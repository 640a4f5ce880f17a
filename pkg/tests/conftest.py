from pathlib import Path

import pytest

from mmclust import datasets

FIXTURES = Path(__file__).parent / "fixtures"
TABLES = FIXTURES / "tables"


@pytest.fixture(scope="session")
def women():
    return datasets.southern_women()


@pytest.fixture(scope="session")
def readers():
    return datasets.readers()


@pytest.fixture(scope="session")
def toybib():
    return datasets.toybib()


@pytest.fixture(scope="session")
def karate_graph():
    return datasets.graph("karate")


@pytest.fixture(scope="session")
def karate():
    return datasets.karate("reflexive")


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Print and record one PASS/FAIL line for an acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def record(name, ok, detail=""):
        detail = detail.strip()
        line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f": {detail}" if detail else "")
        print(line)
        lines.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
