from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import connected_multigraphs
from graphrigidity.corpus import complete_bipartite, complete_graph, cube_graph, petersen_graph
from graphrigidity.errors import SizeBoundError
from graphrigidity.graph import Multigraph
from graphrigidity.iso import (
    canonical_form,
    deck_from_cards,
    edge_bijection,
    edge_deck,
    is_isomorphism,
    isomorphic,
)
from graphrigidity.verify import brute_isomorphic, random_relabel


@given(connected_multigraphs(), st.integers(0, 10**6))
def test_canonical_key_is_label_invariant(G, seed):
    H = random_relabel(G, random.Random(seed))
    assert canonical_form(G).key == canonical_form(H).key
    ok, mapping = isomorphic(G, H)
    assert ok and is_isomorphism(G, H, mapping)


@given(connected_multigraphs(max_vertices=5, max_extra=3), connected_multigraphs(max_vertices=5, max_extra=3))
def test_canonical_key_agrees_with_permutation_search(G, H):
    assert (canonical_form(G).key == canonical_form(H).key) == brute_isomorphic(G, H)


def test_coloured_isomorphism_respects_colours():
    P = Multigraph.from_pairs([(0, 1), (1, 2)])
    assert isomorphic(P, P, colors_g={0: 1, 1: 0, 2: 0}, colors_h={0: 0, 1: 0, 2: 1})[0]
    assert not isomorphic(P, P, colors_g={0: 1, 1: 0, 2: 0}, colors_h={0: 0, 1: 1, 2: 0})[0]


def test_size_bound():
    with pytest.raises(SizeBoundError):
        canonical_form(complete_graph(5), bound=4)


def test_edge_bijection_preserves_endpoints():
    G = Multigraph.from_pairs([(0, 1), (0, 1), (1, 2), (2, 0)])
    H = random_relabel(G, random.Random(3))
    _, vmap = isomorphic(G, H)
    emap = edge_bijection(G, H, vmap)
    assert sorted(emap.values(), key=str) == sorted(H.edge_ids, key=str)
    for e, u, v in G.edges:
        assert {vmap[u], vmap[v]} == set(H.endpoints(emap[e]))


@pytest.mark.parametrize(
    "G, classes",
    [(complete_graph(4), 1), (complete_bipartite(3, 3), 1), (petersen_graph(), 1), (cube_graph(), 1)],
)
def test_edge_transitive_graphs_have_one_card_class(G, classes):
    deck = edge_deck(G)
    assert len(deck.classes) == classes
    assert deck.size == G.n_edges


@given(connected_multigraphs(), st.integers(0, 10**6))
def test_deck_is_label_invariant(G, seed):
    H = random_relabel(G, random.Random(seed))
    assert edge_deck(G) == edge_deck(H)
    rebuilt = deck_from_cards([(c.card, c.multiplicity) for c in edge_deck(H).classes])
    assert rebuilt == edge_deck(G)
