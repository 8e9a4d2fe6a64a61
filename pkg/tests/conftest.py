import numpy as np
import pytest

from hstiefel.group_action import act_point, random_group_element
from hstiefel.morse import critical_levels, notable_point

GRID = [(2, 1), (3, 1), (3, 2), (4, 2), (5, 2), (5, 3), (6, 3)]

ACCEPTANCE_LINES = []


def valid_triples(max_n):
    return [(n, k, q) for n in range(2, max_n + 1) for k in range(1, n) for q in critical_levels(n, k)]


def random_critical_point(seed):
    """g . x_0^q for a random (n, k, q) with n <= 6 and a random g."""
    rng = np.random.default_rng(seed)
    triples = valid_triples(6)
    n, k, q = triples[rng.integers(len(triples))]
    g = random_group_element(n, k, seed)
    return act_point(g, notable_point(n, k, q)), q


@pytest.fixture
def rng():
    return np.random.default_rng(20200414)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
