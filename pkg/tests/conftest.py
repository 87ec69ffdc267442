from pathlib import Path

import pytest

from rgoperad.cli import load_model
from rgoperad.contraction_operad import QftModel, VertexType
from rgoperad.graphs import ColorSignature

MODELS = Path(__file__).resolve().parent.parent / "models"


@pytest.fixture(scope="session")
def models_dir():
    return MODELS


@pytest.fixture(scope="session")
def phi2():
    return load_model(MODELS / "phi2.json")


@pytest.fixture(scope="session")
def qed():
    return load_model(MODELS / "qed.json")


@pytest.fixture(scope="session")
def phi4():
    return load_model(MODELS / "phi4.json")


@pytest.fixture(scope="session")
def one_leg():
    """One field, vertices with a single leg."""
    sig = ColorSignature(("L",), ("phi",))
    return QftModel(sig, {("phi", "phi")}, [VertexType("L", ("phi",), "v")])


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(RESULTS, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)
