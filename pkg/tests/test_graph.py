from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import connected_multigraphs
from graphrigidity.errors import GraphFormatError, LemmaTreeError, NotConnectedError
from graphrigidity.graph import (
    Multigraph,
    all_bfs_spanning_trees,
    betti_number,
    bfs_spanning_tree,
    constrained_spanning_tree,
    cut_vertices,
    cycle_count,
    distance,
    distance_avoiding_edge,
    format_graph,
    near_geodesic_tree,
    parse_graph,
    shortest_path_tree,
)
from graphrigidity.verify import brute_cycle_count


def _is_spanning_tree(G, tree):
    if len(tree) != G.n_vertices - 1:
        return False
    return len(G.bfs_distances(G.vertices[0], avoid_edges=set(G.edge_ids) - set(tree))) == G.n_vertices


def _tree_depths(G, root, tree):
    H = Multigraph(G.vertices, [t for t in G.edges if t[0] in tree])
    return H.bfs_distances(root)


def test_parse_and_format_round_trip():
    text = "# a theta graph\nv a\nv b\ne x a b\ne y a b\ne z b a\n"
    G = parse_graph(text)
    assert G.n_vertices == 2 and G.n_edges == 3
    assert parse_graph(format_graph(G)) == G


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("v a\nv a\n", 2),
        ("v a\ne 1 a b\n", 2),
        ("v a\nv b\ne 1 a a\n", 3),
        ("v a\nv b\ne 1 a b\ne 1 b a\n", 4),
        ("v a\nq 1\n", 2),
        ("v a\nv b\ne 1 a\n", 3),
    ],
)
def test_format_errors_carry_line_numbers(text, lineno):
    with pytest.raises(GraphFormatError) as info:
        parse_graph(text)
    assert info.value.lineno == lineno
    assert f"line {lineno}" in str(info.value)


@given(connected_multigraphs())
def test_text_format_round_trips(G):
    H = parse_graph(format_graph(G))
    assert sorted((str(e), str(u), str(v)) for e, u, v in G.edges) == sorted(
        (e, u, v) for e, u, v in H.edges
    )


@given(connected_multigraphs())
def test_betti_number_counts_independent_cycles(G):
    assert betti_number(G) == G.n_edges - G.n_vertices + 1 >= 0


def test_betti_number_requires_connected():
    with pytest.raises(NotConnectedError):
        betti_number(Multigraph([0, 1, 2], [(0, 0, 1)]))


@given(connected_multigraphs())
def test_cut_vertices_match_deletion(G):
    brute = set()
    for x in G.vertices:
        H = G.remove_vertex(x)
        if H.n_vertices and not H.is_connected():
            brute.add(x)
    assert cut_vertices(G) == brute


@given(connected_multigraphs(max_vertices=5, max_extra=4), st.integers(2, 6))
def test_cycle_count_matches_edge_subsets(G, r):
    assert cycle_count(G, r) == brute_cycle_count(G, r)


def test_cycle_count_parallel_edges():
    theta = Multigraph.from_pairs([(0, 1)] * 3)
    assert cycle_count(theta, 2) == 3
    assert cycle_count(theta, 3) == 0


@given(connected_multigraphs())
def test_distance_avoiding_edge_matches_deletion(G):
    for e, u, v in G.edges:
        assert distance_avoiding_edge(G, e, u, v) == distance(G.remove_edge(e), u, v)


@given(connected_multigraphs())
def test_bfs_spanning_tree_is_shortest_path_tree(G):
    root = G.vertices[0]
    tree = bfs_spanning_tree(G, root)
    assert _is_spanning_tree(G, tree)
    assert _tree_depths(G, root, tree) == G.bfs_distances(root)


@given(connected_multigraphs(max_vertices=5, max_extra=3))
def test_all_bfs_trees_are_distinct_shortest_path_trees(G):
    root = G.vertices[0]
    trees = all_bfs_spanning_trees(G, root)
    assert len(set(trees)) == len(trees)
    for t in trees:
        assert _tree_depths(G, root, t) == G.bfs_distances(root)
    brute = [
        frozenset(c)
        for c in itertools.combinations(G.edge_ids, G.n_vertices - 1)
        if _is_spanning_tree(G, c) and _tree_depths(G, root, c) == G.bfs_distances(root)
    ]
    assert set(brute) == set(trees)


@given(connected_multigraphs(), st.data())
def test_near_geodesic_tree_keeps_shortest_paths(G, data):
    root = G.vertices[0]
    exclude = set(data.draw(st.lists(st.sampled_from(G.edge_ids), max_size=2)))
    if len(G.bfs_distances(root, avoid_edges=exclude)) != G.n_vertices:
        with pytest.raises(NotConnectedError):
            near_geodesic_tree(G, root, exclude)
        return
    tree, kept = near_geodesic_tree(G, root, exclude)
    assert _is_spanning_tree(G, tree) and not tree & exclude
    depth = _tree_depths(G, root, tree)
    dist = G.bfs_distances(root)
    for x in G.vertices:
        assert (depth[x] == dist[x]) == (x in kept)
    full = shortest_path_tree(G, root, exclude)
    assert (full is not None) == (len(kept) == G.n_vertices)


@given(connected_multigraphs(min_vertices=3), st.data())
def test_constrained_tree_avoids_both_edges(G, data):
    alpha = data.draw(st.sampled_from(G.vertices))
    v = data.draw(st.sampled_from([x for x in G.vertices if x != alpha]))
    try:
        ct = constrained_spanning_tree(G, alpha, v, strict=False)
    except LemmaTreeError:
        return
    assert ct.e1.terminus == alpha and ct.ev.terminus == v
    assert ct.e1.edge != ct.ev.edge
    assert ct.e1.edge not in ct.tree and ct.ev.edge not in ct.tree
    assert _is_spanning_tree(G, ct.tree)


def test_constrained_tree_enforces_degree_condition():
    path_like = Multigraph.from_pairs([(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    with pytest.raises(LemmaTreeError, match="hypotheses violated"):
        constrained_spanning_tree(path_like, 1, 3)
