from pathlib import Path

import pytest

from flatherm.formats import load_algebra

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

# lines printed by the acceptance suite, repeated in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def fixture_path():
    return lambda name: FIXTURES / f"{name}.json"


@pytest.fixture
def load_fixture():
    def load(name, exact=None):
        L, g, J, _ = load_algebra(FIXTURES / f"{name}.json", exact=exact)
        return L, g, J

    return load


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
