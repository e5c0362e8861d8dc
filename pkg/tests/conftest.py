import numpy as np
import pytest

from maxlinear_ttt.graph import build_ttt
from maxlinear_ttt.model import MaxLinearModel

NODES8 = range(1, 9)

# edge lists transcribed from the four example figures
FIG1_EDGES = [(1, 2), (1, 3), (3, 2), (3, 5), (3, 7), (3, 6), (5, 6), (5, 7), (4, 3), (8, 7), (7, 6)]
FIG2_EDGES = [(1, 2), (3, 1), (3, 2), (3, 5), (3, 7), (3, 6), (5, 6), (5, 7), (4, 3), (7, 8), (7, 6)]
FIG3_EDGES = [(1, 2), (3, 1), (3, 2), (3, 5), (7, 3), (7, 5), (3, 6), (5, 6), (3, 4), (8, 7), (7, 6)]
FIG4_EDGES = [(1, 2), (1, 3), (3, 2), (3, 5), (3, 7), (3, 6), (5, 6), (5, 7), (3, 4), (7, 8), (7, 6)]


@pytest.fixture(scope="session")
def fig1():
    return build_ttt(NODES8, FIG1_EDGES)


@pytest.fixture(scope="session")
def fig2():
    return build_ttt(NODES8, FIG2_EDGES)


@pytest.fixture(scope="session")
def fig3():
    return build_ttt(NODES8, FIG3_EDGES)


@pytest.fixture(scope="session")
def fig4():
    return build_ttt(NODES8, FIG4_EDGES)


@pytest.fixture(scope="session")
def chain():
    """1 -> 2 -> 3 with c12 = 0.5, c23 = 0.4."""
    g = build_ttt([1, 2, 3], [(1, 2), (2, 3)])
    return MaxLinearModel.from_weights(g, {(1, 2): 0.5, (2, 3): 0.4})


@pytest.fixture(scope="session")
def tour3():
    """Tournament 1 -> 2 -> 3, 1 -> 3 with c12 = 0.5, c23 = 0.4, c13 = 0.3."""
    g = build_ttt([1, 2, 3], [(1, 2), (2, 3), (1, 3)])
    return MaxLinearModel.from_weights(g, {(1, 2): 0.5, (2, 3): 0.4, (1, 3): 0.3})


@pytest.fixture(scope="session")
def vstruct():
    """1 -> 3 <- 2 with c13 = 0.4, c23 = 0.5."""
    g = build_ttt([1, 2, 3], [(1, 3), (2, 3)])
    return MaxLinearModel.from_weights(g, {(1, 3): 0.4, (2, 3): 0.5})


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance summary ------------------------------------------------------

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {k}. {line}")
