import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from edgeadvisor import generate_grid  # noqa: E402


@pytest.fixture(scope="session")
def all_grids():
    return {g: generate_grid(g) for g in ("set1", "set2", "set3")}


@pytest.fixture(scope="session")
def all_specs(all_grids):
    return [s for specs in all_grids.values() for s in specs]


@pytest.fixture(autouse=True)
def _no_env_calibration(monkeypatch):
    monkeypatch.delenv("EDGE_ADVISOR_CALIBRATION", raising=False)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion label")
