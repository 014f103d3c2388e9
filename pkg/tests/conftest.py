import itertools

import pytest

from qwalk.embeddings import enumerate_rotation_systems
from qwalk.factorizations import LinearOrders, enumerate_shunt_decompositions, validate_linear_orders_for_shunt_model
from qwalk.graph import complete_graph
from qwalk.harness import NAMED_GRAPHS
from qwalk.walks import arc_reversal_from_rotation, arc_reversal_unitary, make_coin, shunt_unitary, simple_random_walk, szegedy_unitary

# Filled by tests/test_acceptance.py; one line per acceptance criterion.
ACCEPTANCE_LINES: list[str] = []

K33_UNIFORM_ORDERS = [(3, 4, 5), (4, 5, 3), (5, 3, 4), (1, 0, 2), (2, 1, 0), (0, 2, 1)]


def uniform_k33_walk():
    g = NAMED_GRAPHS["K33"]
    dec = validate_linear_orders_for_shunt_model(g, LinearOrders.of(K33_UNIFORM_ORDERS))
    return shunt_unitary(g, dec, make_coin("circulant7", 3))


def small_walks():
    """A mixed bag of walks from every model, used by the spectral invariants."""
    out = []
    c7 = make_coin("circulant7", 3)
    for name in ("K4", "K33", "K2xK3"):
        g = NAMED_GRAPHS[name]
        for rot in itertools.islice(enumerate_rotation_systems(g), 0, None, 7):
            out.append((f"{name}-rot", arc_reversal_from_rotation(g, rot, c7)))
        for dec in itertools.islice(enumerate_shunt_decompositions(g), 3):
            out.append((f"{name}-shunt", shunt_unitary(g, dec, make_coin("gauss", 3))))
        out.append((f"{name}-grover", arc_reversal_unitary(g, LinearOrders.lexicographic(g), make_coin("grover", 3))))
        out.append((f"{name}-szegedy", szegedy_unitary(simple_random_walk(g))))
    g = complete_graph(3)
    out.append(("K3-fourier", arc_reversal_unitary(g, LinearOrders.lexicographic(g), make_coin("fourier", 2))))
    out.append(("K33-uniform", uniform_k33_walk()))
    return out


@pytest.fixture(scope="session")
def walks():
    return small_walks()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
