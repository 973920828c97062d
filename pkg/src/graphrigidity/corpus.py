"""Named test graphs and exhaustive generation of the hypothesis-passing corpus."""

from __future__ import annotations

import itertools
from typing import Iterator

from .graph import Multigraph, cut_vertices
from .iso import canonical_form
from .reconstruction import validate_hypotheses


def complete_graph(n: int) -> Multigraph:
    return Multigraph.from_pairs(itertools.combinations(range(n), 2), range(n))


def complete_bipartite(a: int, b: int) -> Multigraph:
    return Multigraph.from_pairs([(i, a + j) for i in range(a) for j in range(b)], range(a + b))


def cycle_graph(n: int) -> Multigraph:
    return Multigraph.from_pairs([(i, (i + 1) % n) for i in range(n)], range(n))


def theta_graph(k: int = 3) -> Multigraph:
    """Two vertices joined by k parallel edges."""
    return Multigraph.from_pairs([(0, 1)] * k, range(2))


def petersen_graph() -> Multigraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Multigraph.from_pairs(outer + spokes + inner, range(10))


def cube_graph() -> Multigraph:
    pairs = [(x, x ^ (1 << k)) for x in range(8) for k in range(3) if x < x ^ (1 << k)]
    return Multigraph.from_pairs(pairs, range(8))


def k4_plus_parallel() -> Multigraph:
    return Multigraph.from_pairs(list(itertools.combinations(range(4), 2)) + [(0, 1)], range(4))


def bowtie() -> Multigraph:
    """Two triangles sharing a vertex."""
    return Multigraph.from_pairs([(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)], range(5))


def c4_chord() -> Multigraph:
    return Multigraph.from_pairs([(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], range(4))


NAMED = {
    "K4": lambda: complete_graph(4),
    "K33": lambda: complete_bipartite(3, 3),
    "theta": theta_graph,
    "petersen": petersen_graph,
    "Q3": cube_graph,
    "C5": lambda: cycle_graph(5),
    "K4+e": k4_plus_parallel,
    "bowtie": bowtie,
    "C4+chord": c4_chord,
}

REGULAR = ("K4", "K33", "theta", "petersen", "Q3")


def named_graph(name: str) -> Multigraph:
    try:
        return NAMED[name]()
    except KeyError:
        raise KeyError(f"unknown graph {name!r}; known: {sorted(NAMED)}") from None


# ---------------------------------------------------------------------------
# generation


def _key(G: Multigraph):
    return canonical_form(G, bound=64).key


def kernels(max_edges: int) -> list:
    """Connected loopless multigraphs without cut vertices, minimum degree >= 3,
    at most ``max_edges`` edges, one per isomorphism class.

    Grown edge by edge from the empty graph on n vertices; a partial graph is
    dropped once its degree deficit cannot be covered by the remaining edges.
    """
    out = []
    for n in range(2, 2 * max_edges // 3 + 1):
        level = {(): Multigraph(range(n), [])}
        for m in range(1, max_edges + 1):
            nxt = {}
            for G in level.values():
                for u, v in itertools.combinations(range(n), 2):
                    H = G.add_edge(u, v, m)
                    deficit = sum(max(0, 3 - H.degree(x)) for x in H.vertices)
                    if deficit > 2 * (max_edges - m):
                        continue
                    k = _key(H)
                    if k not in nxt:
                        nxt[k] = H
            level = nxt
            for G in level.values():
                if G.min_degree() >= 3 and G.is_connected() and not cut_vertices(G):
                    out.append(G.with_integer_labels())
    return out


def subdivide(G: Multigraph, edges) -> Multigraph:
    """Subdivide each listed edge once."""
    H = G
    for e in edges:
        u, v = H.endpoints(e)
        w = H.fresh_vertex_id()
        H = Multigraph(list(H.vertices) + [w], [x for x in H.edges if x[0] != e])
        H = H.add_edge(u, w).add_edge(w, v)
    return H


def corpus_gen(max_edges: int) -> list:
    """Every connected multigraph with at most ``max_edges`` edges that passes
    :func:`validate_hypotheses`, up to isomorphism, integer-labelled.

    These are exactly the kernels above with any set of edges subdivided once:
    suppressing the (pairwise non-adjacent) degree-2 vertices of such a graph
    gives back a kernel.
    """
    seen = {}
    for K in kernels(max_edges):
        budget = max_edges - K.n_edges
        ids = K.edge_ids
        for k in range(0, min(budget, len(ids)) + 1):
            for subset in itertools.combinations(ids, k):
                G = subdivide(K, subset).with_integer_labels()
                key = _key(G)
                if key in seen:
                    continue
                if validate_hypotheses(G).passed:
                    seen[key] = G
    return sorted(seen.values(), key=lambda G: (G.n_edges, G.n_vertices, _key(G)))


def brute_force_corpus(max_edges: int, max_vertices: int | None = None) -> list:
    """Oracle for :func:`corpus_gen`: every edge multiset on every vertex count."""
    seen = {}
    top = max_vertices if max_vertices is not None else max_edges
    for n in range(2, top + 1):
        slots = list(itertools.combinations(range(n), 2))
        for m in range(n - 1, max_edges + 1):
            for chosen in itertools.combinations_with_replacement(slots, m):
                G = Multigraph.from_pairs(chosen, range(n))
                if G.min_degree() < 2 or not G.is_connected():
                    continue
                key = _key(G)
                if key not in seen and validate_hypotheses(G).passed:
                    seen[key] = G
    return sorted(seen.values(), key=lambda G: (G.n_edges, G.n_vertices, _key(G)))


def iter_corpus_with_named(max_edges: int) -> Iterator[tuple]:
    """``(name, graph)`` for the generated corpus followed by the passing named graphs."""
    for i, G in enumerate(corpus_gen(max_edges)):
        yield f"corpus-{i:03d}", G
    for name in sorted(NAMED):
        G = named_graph(name)
        if validate_hypotheses(G).passed:
            yield name, G
