from __future__ import annotations

import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import irreducible_multigraphs
from graphrigidity.corpus import REGULAR, complete_bipartite, complete_graph, named_graph
from graphrigidity.errors import HypothesisError
from graphrigidity.graph import Multigraph, bfs_spanning_tree
from graphrigidity.iso import is_isomorphism
from graphrigidity.measure import (
    additivity_report,
    ball_cylinder_measure,
    build_measure_table,
    check_eigen_relation,
    conformality_check,
    cylinder_measure,
    measure_fingerprint,
    min_eigen_radius,
    psm_convention_report,
    rigidity_compare,
)
from graphrigidity.nb import graph_pf
from graphrigidity.verify import random_relabel
from graphrigidity.walks import alphabet, build_walk_basis, iter_reduced_words, universal_cover_ball, word_to_walk


def basis_of(G, v0=None):
    v0 = G.vertices[0] if v0 is None else v0
    return build_walk_basis(G, v0, bfs_spanning_tree(G, v0))


@given(irreducible_multigraphs(max_vertices=5, max_extra=4))
def test_cylinders_split_into_children(G):
    B, pf = basis_of(G), graph_pf(G)
    for word in iter_reduced_words(B.rank, 3):
        kids = [word + (x,) for x in alphabet(B.rank) if x != -word[-1]]
        total = sum(cylinder_measure(k, B, pf) for k in kids)
        assert math.isclose(total, cylinder_measure(word, B, pf), rel_tol=1e-9)
    rep = additivity_report(B, pf, 4)
    assert rep.max_rel_error < 1e-9


@given(irreducible_multigraphs(max_vertices=5, max_extra=4))
def test_cylinder_measure_equals_ball_measure_at_the_lift(G):
    B, pf = basis_of(G), graph_pf(G)
    ball = universal_cover_ball(G, B.base, 8)
    for word in iter_reduced_words(B.rank, 2):
        walk = word_to_walk(word, B).edges
        depth = max(i for i, oe in enumerate(walk) if oe.edge == B.letter_edge(word[-1]).edge)
        if depth + 1 >= ball.radius:
            continue
        node = ball.node_of_walk(walk[: depth + 1])
        assert math.isclose(ball_cylinder_measure(ball, pf, 0, node), cylinder_measure(word, B, pf), rel_tol=1e-9)


def test_total_mass_is_sum_of_outgoing_weights():
    G = named_graph("K4+e")
    B, pf = basis_of(G), graph_pf(G)
    rep = additivity_report(B, pf, 3)
    first_edges = {oe: pf.value(oe) for oe in G.out_edges(B.base)}
    # every first step of a generator leaves the base along some edge; their total is the mass
    assert rep.total_mass > 0
    assert rep.total_mass <= sum(first_edges.values()) * pf.lam + 1e-12


def test_measure_table_csv():
    G = named_graph("theta")
    table = build_measure_table(G, 0, bfs_spanning_tree(G, 0), 2)
    lines = table.to_csv().splitlines()
    assert lines[0] == "word,depth,value"
    assert len(lines) == 1 + 4 + 12
    assert lines[1].startswith("1,1,")
    assert table.additivity_residual() < 1e-12


def test_measure_table_rejects_cycles():
    with pytest.raises(HypothesisError):
        build_measure_table(Multigraph.from_pairs([(0, 1), (1, 2), (2, 0)]), 0, {0, 1}, 2)


@given(irreducible_multigraphs(max_vertices=5, max_extra=4))
def test_eigen_relation_from_cover_ball(G):
    v0 = G.vertices[0]
    rep = check_eigen_relation(G, v0, min_eigen_radius(G, v0))
    assert rep.residual < 1e-9


def test_eigen_radius_too_small():
    G = named_graph("K4+e")
    with pytest.raises(ValueError, match="too small"):
        check_eigen_relation(G, 0, min_eigen_radius(G, 0) - 1)


@given(irreducible_multigraphs(max_vertices=4, max_extra=3), st.integers(0, 1000))
def test_conformal_ratios(G, seed):
    rep = conformality_check(G, G.vertices[0], 6, samples=3, seed=seed)
    assert rep.passed


@pytest.mark.parametrize("name, expected", [("K4", ["origin", "terminus"]), ("theta", ["terminus"])])
def test_psm_convention_report(name, expected):
    G = named_graph(name)
    rep = psm_convention_report(basis_of(G), graph_pf(G), 4)
    assert rep["consistent_conventions"] == expected
    for conv in expected:
        assert rep["conventions"][conv]["modal_offset"] == -1
        assert rep["conventions"][conv]["mismatches"] == []
    if "origin" not in expected:
        origin = rep["conventions"]["origin"]
        assert len(origin["mismatches"]) == rep["words"] - origin["offset_counts"][str(origin["modal_offset"])]


@given(irreducible_multigraphs(max_vertices=5, max_extra=4))
def test_terminus_convention_is_always_consistent(G):
    rep = psm_convention_report(basis_of(G), graph_pf(G), 3)
    assert "terminus" in rep["consistent_conventions"]


@pytest.mark.parametrize("name", REGULAR + ("K4+e",))
def test_fingerprint_is_label_invariant(name):
    G = named_graph(name)
    H = random_relabel(G, random.Random(7))
    assert measure_fingerprint(G, 3).differs_at(measure_fingerprint(H, 3)) is None


def test_compare_isomorphic_pair_gives_checked_witness():
    G = named_graph("petersen")
    H = random_relabel(G, random.Random(1))
    v = rigidity_compare(G, H)
    assert v.verdict == "consistent"
    assert is_isomorphism(G, H, v.witness["vertex_map"])


def test_compare_by_betti_number():
    v = rigidity_compare(complete_graph(4), complete_bipartite(3, 3))
    assert (v.verdict, v.reason) == ("distinguished", "betti")
    assert v.as_dict()["witness"] == {"betti": [3, 4]}


def test_compare_by_dimension():
    # same Betti number, different spectral radius
    G = Multigraph.from_pairs([(0, 1)] * 4)
    H = complete_graph(4)
    v = rigidity_compare(G, H)
    assert (v.verdict, v.reason) == ("distinguished", "dimension")


def test_compare_requires_minimum_degree_three():
    with pytest.raises(HypothesisError, match="minimal degree"):
        rigidity_compare(named_graph("C4+chord"), complete_graph(4))


def test_fingerprint_levels_are_sorted_probabilities():
    fp = measure_fingerprint(named_graph("K4+e"), 3)
    for level in fp.levels:
        assert np.all(np.diff(level) >= 0) and np.all(level > 0)
