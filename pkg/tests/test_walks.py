from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import irreducible_multigraphs
from graphrigidity.corpus import named_graph
from graphrigidity.graph import bfs_spanning_tree
from graphrigidity.measure import iter_word_walks, overlap_formula_lengths, sweep_word_walks
from graphrigidity.walks import (
    alphabet,
    build_walk_basis,
    busemann_limit,
    busemann_on_cylinder,
    concatenate,
    count_reduced_words,
    is_nonbacktracking,
    is_walk,
    iter_reduced_words,
    lift_conventions_agree,
    lifted_final_edge_depth,
    naive_reduce,
    overlap_table,
    universal_cover_ball,
    word_length_via_overlaps,
    word_to_walk,
)


def basis_of(G, v0=None):
    v0 = G.vertices[0] if v0 is None else v0
    return build_walk_basis(G, v0, bfs_spanning_tree(G, v0))


@st.composite
def basis_and_word(draw, max_len=6):
    G = draw(irreducible_multigraphs(max_vertices=5, max_extra=4))
    v0 = draw(st.sampled_from(G.vertices))
    B = basis_of(G, v0)
    letters = alphabet(B.rank)
    n = draw(st.integers(1, max_len))
    word = [draw(st.sampled_from(letters))]
    while len(word) < n:
        word.append(draw(st.sampled_from([x for x in letters if x != -word[-1]])))
    return B, tuple(word)


@pytest.mark.parametrize("rank", [1, 2, 3])
def test_reduced_word_counts(rank):
    for n in range(1, 5):
        brute = [
            w for w in itertools.product(alphabet(rank), repeat=n) if all(a != -b for a, b in zip(w, w[1:]))
        ]
        listed = [w for w in iter_reduced_words(rank, n) if len(w) == n]
        assert sorted(listed) == sorted(brute)
        assert count_reduced_words(rank, n) == len(brute)


@given(irreducible_multigraphs())
def test_generators_are_closed_nonbacktracking_walks(G):
    B = basis_of(G)
    assert B.rank == G.n_edges - G.n_vertices + 1
    for x in alphabet(B.rank):
        walk = B.letter_walk(x)
        assert walk[0].origin == B.base and walk[-1].terminus == B.base
        assert is_walk(walk) and is_nonbacktracking(walk)
        assert walk[B.distinguished_position(x)] == B.letter_edge(x)
        assert B.letter_edge(x).edge not in B.tree


@given(basis_and_word())
def test_word_walk_is_naive_reduction(data):
    B, word = data
    walk = word_to_walk(word, B)
    expected = naive_reduce([oe for x in word for oe in B.letter_walk(x)])
    assert walk.edges == expected
    assert is_nonbacktracking(walk.edges)


@given(basis_and_word())
def test_overlap_length_formula(data):
    B, word = data
    assert word_length_via_overlaps(word, B.lengths(), overlap_table(B)) == len(word_to_walk(word, B))


@given(basis_and_word())
def test_final_edge_survives_reduction(data):
    B, word = data
    walk = word_to_walk(word, B).edges
    depth = lifted_final_edge_depth(word, B)
    assert walk[depth].edge == B.letter_edge(word[-1]).edge
    assert lift_conventions_agree(word, B)


@given(irreducible_multigraphs(max_vertices=5, max_extra=4))
def test_array_sweep_matches_generator(G):
    B = basis_of(G)
    sw = sweep_word_walks(B, 3)
    ref = list(iter_word_walks(B, 3))
    assert sw.size == len(ref)
    for i, (word, length, depth) in enumerate(ref):
        assert sw.word(i) == word
        assert (sw.walk_length[i], sw.lift_depth[i]) == (length, depth)
        parent = sw.parent[i]
        assert (parent < 0) == (len(word) == 1)
        if parent >= 0:
            assert sw.word(parent) == word[:-1]
    assert (overlap_formula_lengths(B, sw) == sw.walk_length).all()


def test_concatenate_cancels_at_the_junction():
    G = named_graph("K4")
    B = basis_of(G)
    for x, y in itertools.product(alphabet(B.rank), repeat=2):
        if x != -y:
            assert concatenate(B.letter_walk(x), B.letter_walk(y)) == naive_reduce(
                B.letter_walk(x) + B.letter_walk(y)
            )


def _count_nb_walks(G, v0, R):
    total, layer = 1, [(oe,) for oe in G.out_edges(v0)]
    for _ in range(R):
        total += len(layer)
        layer = [w + (oe,) for w in layer for oe in G.out_edges(w[-1].terminus) if oe.edge != w[-1].edge]
    return total


@given(irreducible_multigraphs(max_vertices=4, max_extra=3), st.integers(1, 4))
def test_cover_ball_is_the_tree_of_nonbacktracking_walks(G, R):
    ball = universal_cover_ball(G, G.vertices[0], R)
    assert ball.is_tree()
    assert ball.size == _count_nb_walks(G, G.vertices[0], R)
    for k in range(ball.size):
        assert ball.node_of_walk(ball.walk(k)) == k
        assert is_nonbacktracking(ball.walk(k))


def test_tree_distances_match_bfs():
    ball = universal_cover_ball(named_graph("K4+e"), 0, 4)
    nodes = list(range(ball.size))
    for x in (0, 3, 17, ball.size - 1):
        assert ball.distances_between(x, nodes) == ball.distances_from(x)


def test_busemann_limit_equals_distance_to_cylinder_root():
    ball = universal_cover_ball(named_graph("K4"), 0, 6)
    for x in (0, 1, 5):
        for f in range(1, ball.size):
            if ball.depth[f] in (2, 3) and not ball.is_descendant(x, f):
                assert busemann_on_cylinder(ball, f, x) == ball.distances_between(x, [ball.parent[f]])[0]
    f = next(k for k in range(1, ball.size) if ball.depth[k] == 3)
    x, y = 0, ball.children[0][-1]
    if not ball.is_descendant(y, f):
        assert busemann_limit(ball, x, y, f) == (
            ball.distances_between(x, [ball.parent[f]])[0] - ball.distances_between(y, [ball.parent[f]])[0]
        )
