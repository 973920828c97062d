from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from graphrigidity.graph import Multigraph, betti_number

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: list = []


@st.composite
def connected_multigraphs(draw, min_vertices=2, max_vertices=6, max_extra=5):
    """A spanning path plus random extra (possibly parallel) edges; no loops."""
    n = draw(st.integers(min_vertices, max_vertices))
    order = draw(st.permutations(range(n)))
    pairs = [(order[i], order[i + 1]) for i in range(n - 1)]
    extra = draw(
        st.lists(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda t: t[0] != t[1]),
            max_size=max_extra,
        )
    )
    return Multigraph.from_pairs(pairs + extra, range(n))


@st.composite
def irreducible_multigraphs(draw, max_vertices=6, max_extra=6):
    """Connected, minimum degree >= 2 and first Betti number >= 2."""
    G = draw(connected_multigraphs(max_vertices=max_vertices, max_extra=max_extra))
    # close up degree-1 vertices so the operator is irreducible
    low = [x for x in G.vertices if G.degree(x) < 2]
    pairs = [(u, v) for _, u, v in G.edges]
    for x in low:
        y = next(v for v in G.vertices if v != x)
        pairs.append((x, y))
    H = Multigraph.from_pairs(pairs, G.vertices)
    if betti_number(H) < 2:
        a, b = H.vertices[0], H.vertices[1]
        H = Multigraph.from_pairs(pairs + [(a, b), (a, b)], G.vertices)
    return H


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("]")[1].split()[0])):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_corpus():
    from graphrigidity.verify import reconstruction_corpus

    return reconstruction_corpus(7)
