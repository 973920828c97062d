"""Desk-scale isomorphism: canonical certificates by individualisation-refinement.

Colour refinement on edge multiplicities, then a search tree that
individualises each vertex of the first non-singleton cell.  The certificate
is the lexicographically least upper-triangular multiplicity matrix over all
leaves; no automorphism pruning, which is fine below a dozen vertices.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import SizeBoundError
from .graph import Multigraph

DEFAULT_SIZE_BOUND = 12


def _adjacency(G: Multigraph):
    index = {x: i for i, x in enumerate(G.vertices)}
    adj = [dict() for _ in G.vertices]
    for _, u, v in G.edges:
        a, b = index[u], index[v]
        adj[a][b] = adj[a].get(b, 0) + 1
        adj[b][a] = adj[b].get(a, 0) + 1
    return adj


def _refine(adj, colors):
    n_cells = len(set(colors))
    while True:
        sigs = [
            (colors[x], tuple(sorted((colors[y], m) for y, m in adj[x].items())))
            for x in range(len(adj))
        ]
        rank = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [rank[s] for s in sigs]
        if len(rank) == n_cells:
            return new
        colors, n_cells = new, len(rank)


def _canon(adj, colors):
    n = len(adj)
    best = None
    best_order = None

    def leaf(colors):
        order = sorted(range(n), key=colors.__getitem__)
        cert = tuple(adj[order[i]].get(order[j], 0) for i in range(n) for j in range(i + 1, n))
        return cert, order

    def search(colors):
        nonlocal best, best_order
        colors = _refine(adj, colors)
        if len(set(colors)) == n:
            cert, order = leaf(colors)
            if best is None or cert < best:
                best, best_order = cert, order
            return
        sizes = Counter(colors)
        target = min(c for c, k in sizes.items() if k > 1)
        for x in range(n):
            if colors[x] == target:
                search([2 * c if y == x else 2 * c + 1 for y, c in enumerate(colors)])

    search(colors)
    return best, best_order


@dataclass(frozen=True)
class Canonical:
    """Certificate plus the vertex order realising it."""

    key: tuple
    order: tuple = field(compare=False)


def canonical_form(G: Multigraph, colors: dict | None = None, bound: int = DEFAULT_SIZE_BOUND) -> Canonical:
    if G.n_vertices > bound:
        raise SizeBoundError(f"{G.n_vertices} vertices exceeds the isomorphism size bound {bound}")
    adj = _adjacency(G)
    if colors is None:
        init = [0] * G.n_vertices
        palette = ()
    else:
        values = [colors[x] for x in G.vertices]
        palette = tuple(sorted(Counter(values).items(), key=repr))
        rank = {c: i for i, c in enumerate(sorted(set(values), key=repr))}
        init = [rank[c] for c in values]
    if G.n_vertices == 0:
        return Canonical((0, G.n_edges, palette, ()), ())
    cert, order = _canon(adj, init)
    if colors is not None:
        cert = (tuple(init[i] for i in order), cert)
    return Canonical((G.n_vertices, G.n_edges, palette, cert), tuple(G.vertices[i] for i in order))


def isomorphic(G: Multigraph, H: Multigraph, bound: int = DEFAULT_SIZE_BOUND,
               colors_g: dict | None = None, colors_h: dict | None = None):
    """Return ``(True, {g_vertex: h_vertex})`` or ``(False, None)``.

    Optional vertex colourings must be preserved by the bijection.
    """
    if G.n_vertices != H.n_vertices or G.n_edges != H.n_edges:
        if max(G.n_vertices, H.n_vertices) > bound:
            raise SizeBoundError(f"isomorphism size bound {bound} exceeded")
        return False, None
    cg = canonical_form(G, colors_g, bound)
    ch = canonical_form(H, colors_h, bound)
    if cg.key != ch.key:
        return False, None
    return True, dict(zip(cg.order, ch.order))


def edge_bijection(G: Multigraph, H: Multigraph, vertex_map: dict) -> dict:
    """Extend a multiplicity-preserving vertex bijection to edges."""
    pools = {}
    for e, u, v in H.edges:
        pools.setdefault(frozenset((u, v)), []).append(e)
    out = {}
    for e, u, v in G.edges:
        out[e] = pools[frozenset((vertex_map[u], vertex_map[v]))].pop(0)
    return out


@dataclass(frozen=True)
class DeckClass:
    card: Multigraph
    multiplicity: int
    key: tuple = field(repr=False)
    edges: tuple = ()  # originating edge ids when built from a graph


@dataclass(frozen=True)
class Deck:
    """Multiset of isomorphism classes of edge-deleted subgraphs."""

    classes: tuple

    @property
    def size(self) -> int:
        return sum(c.multiplicity for c in self.classes)

    def signature(self) -> tuple:
        return tuple(sorted((c.key, c.multiplicity) for c in self.classes))

    def provenance(self) -> dict:
        return {e: i for i, c in enumerate(self.classes) for e in c.edges}

    def cards(self):
        """Each card once per multiplicity."""
        for c in self.classes:
            for _ in range(c.multiplicity):
                yield c.card

    def __eq__(self, other):
        return isinstance(other, Deck) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())


def deck_from_cards(cards, bound: int = DEFAULT_SIZE_BOUND) -> Deck:
    """Group (card, multiplicity) pairs into isomorphism classes."""
    groups = {}
    for card, mult in cards:
        key = canonical_form(card, bound=bound).key
        if key in groups:
            rep, m, es = groups[key]
            groups[key] = (rep, m + mult, es)
        else:
            groups[key] = (card, mult, ())
    return Deck(tuple(DeckClass(rep, m, key, es) for key, (rep, m, es) in sorted(groups.items())))


def edge_deck(G: Multigraph, bound: int = DEFAULT_SIZE_BOUND) -> Deck:
    if G.n_edges < 1:
        raise ValueError("edge deck needs at least one edge")
    groups = {}
    for e in G.edge_ids:
        card = G.remove_edge(e)
        key = canonical_form(card, bound=bound).key
        groups.setdefault(key, [card, []])[1].append(e)
    return Deck(
        tuple(DeckClass(card, len(es), key, tuple(es)) for key, (card, es) in sorted(groups.items()))
    )


def is_isomorphism(G: Multigraph, H: Multigraph, vertex_map: dict) -> bool:
    """True iff ``vertex_map`` is a bijection V(G) -> V(H) preserving edge multiplicities."""
    if set(vertex_map) != set(G.vertices) or sorted(map(repr, vertex_map.values())) != sorted(
        map(repr, H.vertices)
    ):
        return False
    if G.n_edges != H.n_edges:
        return False
    count_g = Counter(frozenset((vertex_map[u], vertex_map[v])) for _, u, v in G.edges)
    count_h = Counter(frozenset((u, v)) for _, u, v in H.edges)
    return count_g == count_h
