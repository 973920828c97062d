from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given

from conftest import irreducible_multigraphs
from graphrigidity.corpus import REGULAR, cycle_graph, k4_plus_parallel, named_graph
from graphrigidity.errors import ConvergenceError, NotIrreducibleError
from graphrigidity.graph import Multigraph
from graphrigidity.nb import build_nb_matrix, graph_pf, pf_eigenpair, ps_dimension


@given(irreducible_multigraphs())
def test_matrix_entries_follow_definition(G):
    T = build_nb_matrix(G)
    for a in T.index:
        for b in T.index:
            expected = int(a.terminus == b.origin and b.edge != a.edge)
            assert T.entry(a, b) == expected


@given(irreducible_multigraphs())
def test_power_iteration_matches_dense_eigensolver(G):
    T = build_nb_matrix(G)
    pf = pf_eigenpair(T)
    vals, vecs = np.linalg.eig(T.array)
    k = int(np.argmax(vals.real))
    assert abs(vals[k].real - pf.lam) < 1e-8
    v = np.abs(vecs[:, k].real)
    assert np.allclose(v / v.sum(), pf.p, atol=1e-8)
    assert np.all(pf.p > 0) and abs(pf.p.sum() - 1) < 1e-12
    assert np.max(np.abs(T.array @ pf.p - pf.lam * pf.p)) <= 1e-12


@pytest.mark.parametrize("name", REGULAR)
def test_regular_graphs(name):
    G = named_graph(name)
    d = G.degree(G.vertices[0])
    pf = graph_pf(G)
    assert abs(pf.lam - (d - 1)) < 1e-10
    assert np.allclose(pf.p, 1 / (2 * G.n_edges), atol=1e-8)


def test_k4_dimension():
    assert abs(ps_dimension(graph_pf(named_graph("K4"))) - np.log(2)) < 1e-12


def test_pf_vector_separates_orbits_of_k4_plus_parallel():
    pf = graph_pf(k4_plus_parallel())
    assert len({round(x, 9) for x in pf.p}) > 1


def test_cycle_is_not_irreducible():
    with pytest.raises(NotIrreducibleError, match="Betti"):
        build_nb_matrix(cycle_graph(5))


def test_pendant_vertex_is_rejected():
    G = Multigraph.from_pairs([(0, 1), (0, 1), (0, 1), (1, 2)])
    with pytest.raises(NotIrreducibleError, match="degree 1"):
        build_nb_matrix(G)


def test_iteration_budget_is_reported():
    with pytest.raises(ConvergenceError):
        pf_eigenpair(build_nb_matrix(k4_plus_parallel()), tol=1e-15, max_iter=3)
