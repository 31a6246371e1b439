import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from stochgen.experiments import sample_stochastic
from stochgen.matrix import StochMatrix, validate_stochastic

F = Fraction


def mat(rows) -> StochMatrix:
    """Shorthand: rows of ints/strings/Fractions -> validated matrix."""
    return validate_stochastic([[F(x) if not isinstance(x, F) else x for x in r] for r in rows])


@st.composite
def stochastic_matrices(draw, n=None, denominator=12):
    """Stochastic matrices with entries in (1/D)Z, drawn column by column."""
    if n is None:
        n = draw(st.integers(2, 4))
    cols = []
    for _ in range(n):
        cuts = sorted(draw(st.lists(st.integers(0, denominator), min_size=n - 1, max_size=n - 1)))
        edges = [0] + cuts + [denominator]
        cols.append([F(edges[j + 1] - edges[j], denominator) for j in range(n)])
    return StochMatrix(tuple(tuple(r) for r in zip(*cols)))


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture
def random_matrices():
    def make(n, count, denominator=360, seed=0):
        r = random.Random(seed)
        return [sample_stochastic(n, denominator, rng=r) for _ in range(count)]

    return make


# filled by the acceptance module; echoed after the run so the lines survive capture
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
