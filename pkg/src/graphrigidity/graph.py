"""Finite multigraphs and the combinatorial primitives built on them.

Vertices and edge ids are arbitrary hashables (ints or strings in practice).
Parallel edges are allowed, loops are not.  Every structure is immutable so
that results can be cached and shared freely.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, NamedTuple

from .errors import (
    GraphFormatError,
    LemmaTreeError,
    NotConnectedError,
    UnknownEdgeError,
    UnknownVertexError,
)

INF = math.inf


def sort_key(x):
    """Natural ordering for mixed int / str identifiers ("2" < "10")."""
    if isinstance(x, bool):
        return (1, 0, str(x))
    if isinstance(x, int):
        return (0, x, "")
    s = str(x)
    if s.isdigit():
        return (0, int(s), s)
    return (1, 0, s)


class OrientedEdge(NamedTuple):
    """An edge with a chosen direction.

    ``forward`` is True when the direction agrees with the order in which the
    endpoints were declared.
    """

    edge: Hashable
    origin: Hashable
    terminus: Hashable
    forward: bool

    def reverse(self) -> "OrientedEdge":
        return OrientedEdge(self.edge, self.terminus, self.origin, not self.forward)

    @property
    def key(self) -> str:
        return f"{self.edge}:{'+' if self.forward else '-'}"

    def order(self):
        return (sort_key(self.edge), not self.forward)


@dataclass(frozen=True)
class Multigraph:
    vertices: tuple
    edges: tuple  # ((edge_id, u, v), ...) sorted by edge id

    def __init__(self, vertices: Iterable = (), edges: Iterable = ()):
        edges = tuple((e, u, v) for e, u, v in edges)
        vset = set(vertices)
        for _, u, v in edges:
            vset.add(u)
            vset.add(v)
        object.__setattr__(self, "vertices", tuple(sorted(vset, key=sort_key)))
        object.__setattr__(self, "edges", tuple(sorted(edges, key=lambda t: sort_key(t[0]))))
        self._validate()

    def _validate(self):
        seen = set()
        for e, u, v in self.edges:
            if e in seen:
                raise ValueError(f"duplicate edge id {e!r}")
            seen.add(e)
            if u == v:
                raise ValueError(f"edge {e!r} is a loop at {u!r}; loops are not supported")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple], vertices: Iterable = ()) -> "Multigraph":
        """Build a graph numbering edges 0, 1, ... in the given order."""
        return cls(vertices, [(i, u, v) for i, (u, v) in enumerate(pairs)])

    # -- basic queries -------------------------------------------------

    @cached_property
    def _endpoints(self) -> dict:
        return {e: (u, v) for e, u, v in self.edges}

    @cached_property
    def _out(self) -> dict:
        out = {x: [] for x in self.vertices}
        for e, u, v in self.edges:
            out[u].append(OrientedEdge(e, u, v, True))
            out[v].append(OrientedEdge(e, v, u, False))
        return {x: tuple(sorted(lst, key=OrientedEdge.order)) for x, lst in out.items()}

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def edge_ids(self) -> tuple:
        return tuple(e for e, _, _ in self.edges)

    def has_vertex(self, x) -> bool:
        return x in self._out

    def _check_vertex(self, x):
        if x not in self._out:
            raise UnknownVertexError(f"unknown vertex {x!r}")

    def endpoints(self, e) -> tuple:
        try:
            return self._endpoints[e]
        except KeyError:
            raise UnknownEdgeError(f"unknown edge {e!r}") from None

    def oriented(self, e, forward: bool = True) -> OrientedEdge:
        u, v = self.endpoints(e)
        return OrientedEdge(e, u, v, True) if forward else OrientedEdge(e, v, u, False)

    def out_edges(self, x) -> tuple:
        """Oriented edges with origin ``x``, sorted by (edge id, direction)."""
        self._check_vertex(x)
        return self._out[x]

    def degree(self, x) -> int:
        return len(self.out_edges(x))

    def degrees(self) -> dict:
        return {x: len(self._out[x]) for x in self.vertices}

    def min_degree(self) -> int:
        return min(self.degrees().values()) if self.vertices else 0

    def neighbors(self, x) -> list:
        seen = []
        for oe in self.out_edges(x):
            if oe.terminus not in seen:
                seen.append(oe.terminus)
        return sorted(seen, key=sort_key)

    def multiplicity(self, u, v) -> int:
        return sum(1 for oe in self.out_edges(u) if oe.terminus == v)

    @cached_property
    def oriented_edges(self) -> tuple:
        """All 2|E| oriented edges, sorted by edge id then direction."""
        out = []
        for e, u, v in self.edges:
            out.append(OrientedEdge(e, u, v, True))
            out.append(OrientedEdge(e, v, u, False))
        return tuple(out)

    # -- derived graphs ------------------------------------------------

    def remove_edge(self, e) -> "Multigraph":
        self.endpoints(e)
        return Multigraph(self.vertices, [t for t in self.edges if t[0] != e])

    def remove_edges(self, es: Iterable) -> "Multigraph":
        es = set(es)
        for e in es:
            self.endpoints(e)
        return Multigraph(self.vertices, [t for t in self.edges if t[0] not in es])

    def remove_vertex(self, x) -> "Multigraph":
        self._check_vertex(x)
        return Multigraph(
            [y for y in self.vertices if y != x],
            [t for t in self.edges if x not in (t[1], t[2])],
        )

    def add_edge(self, u, v, e=None) -> "Multigraph":
        if e is None:
            e = self.fresh_edge_id()
        return Multigraph(self.vertices, self.edges + ((e, u, v),))

    def fresh_edge_id(self):
        ints = [e for e in self.edge_ids if isinstance(e, int) and not isinstance(e, bool)]
        if len(ints) == len(self.edges):
            return max(ints, default=-1) + 1
        k = len(self.edges)
        while str(k) in self._endpoints or k in self._endpoints:
            k += 1
        return k

    def fresh_vertex_id(self):
        k = len(self.vertices)
        while k in self._out or str(k) in self._out:
            k += 1
        return k

    def relabel(self, vertex_map: dict, edge_map: dict | None = None) -> "Multigraph":
        edge_map = edge_map or {}
        return Multigraph(
            [vertex_map[x] for x in self.vertices],
            [(edge_map.get(e, e), vertex_map[u], vertex_map[v]) for e, u, v in self.edges],
        )

    def with_integer_labels(self) -> "Multigraph":
        vmap = {x: i for i, x in enumerate(self.vertices)}
        emap = {e: i for i, e in enumerate(self.edge_ids)}
        return self.relabel(vmap, emap)

    # -- connectivity --------------------------------------------------

    def bfs_distances(self, source, avoid_edges=frozenset(), avoid_vertices=frozenset()) -> dict:
        self._check_vertex(source)
        dist = {source: 0}
        queue = deque([source])
        while queue:
            x = queue.popleft()
            for oe in self._out[x]:
                y = oe.terminus
                if oe.edge in avoid_edges or y in avoid_vertices or y in dist:
                    continue
                dist[y] = dist[x] + 1
                queue.append(y)
        return dist

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        return len(self.bfs_distances(self.vertices[0])) == len(self.vertices)

    def require_connected(self):
        if not self.is_connected():
            raise NotConnectedError("not connected")

    def __repr__(self):
        es = ", ".join(f"{e}:{u}-{v}" for e, u, v in self.edges)
        return f"Multigraph(|V|={len(self.vertices)}, |E|={len(self.edges)}; {es})"


# ---------------------------------------------------------------------------
# text format


def parse_graph(text: str) -> Multigraph:
    """Parse the line format ``v <id>`` / ``e <edge-id> <u> <v>``; ``#`` starts a comment."""
    vertices = []
    declared = set()
    edges = []
    edge_ids = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) != 2:
                raise GraphFormatError("expected 'v <id>'", lineno)
            if parts[1] in declared:
                raise GraphFormatError(f"duplicate vertex id {parts[1]!r}", lineno)
            declared.add(parts[1])
            vertices.append(parts[1])
        elif tag == "e":
            if len(parts) != 4:
                raise GraphFormatError("expected 'e <edge-id> <u> <v>'", lineno)
            _, eid, u, v = parts
            if eid in edge_ids:
                raise GraphFormatError(f"duplicate edge id {eid!r}", lineno)
            for x in (u, v):
                if x not in declared:
                    raise GraphFormatError(f"edge {eid!r} uses undeclared vertex {x!r}", lineno)
            if u == v:
                raise GraphFormatError(f"edge {eid!r} is a loop", lineno)
            edge_ids.add(eid)
            edges.append((eid, u, v))
        else:
            raise GraphFormatError(f"unknown record type {tag!r}", lineno)
    return Multigraph(vertices, edges)


def format_graph(G: Multigraph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.extend(f"v {x}" for x in G.vertices)
    lines.extend(f"e {e} {u} {v}" for e, u, v in G.edges)
    return "\n".join(lines) + "\n"


def read_graph(path) -> Multigraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


# ---------------------------------------------------------------------------
# operations


def betti_number(G: Multigraph) -> int:
    G.require_connected()
    return G.n_edges - G.n_vertices + 1


def distance(G: Multigraph, u, v) -> float:
    G._check_vertex(v)
    return G.bfs_distances(u).get(v, INF)


def distance_avoiding_edge(G: Multigraph, e, u, v) -> float:
    """Distance from ``u`` to ``v`` in G with edge ``e`` deleted (vertices kept)."""
    G.endpoints(e)
    G._check_vertex(v)
    return G.bfs_distances(u, avoid_edges={e}).get(v, INF)


def cut_vertices(G: Multigraph) -> set:
    G.require_connected()
    cuts = set()
    if G.n_vertices <= 2:
        return cuts
    for x in G.vertices:
        rest = [y for y in G.vertices if y != x]
        reach = G.bfs_distances(rest[0], avoid_vertices={x})
        if len(reach) < len(rest):
            cuts.add(x)
    return cuts


def cycle_count(G: Multigraph, r: int) -> int:
    """Number of subgraphs of G isomorphic to the r-cycle.

    Two parallel edges form a 2-cycle.  For r >= 3 a cycle on distinct
    vertices x1..xr contributes the product of its edge multiplicities.
    """
    if r < 2:
        raise ValueError("r must be >= 2")
    index = {x: i for i, x in enumerate(G.vertices)}
    mult = [dict() for _ in G.vertices]
    for _, u, v in G.edges:
        a, b = index[u], index[v]
        mult[a][b] = mult[a].get(b, 0) + 1
        mult[b][a] = mult[b].get(a, 0) + 1
    if r == 2:
        return sum(m * (m - 1) // 2 for a in range(len(mult)) for b, m in mult[a].items() if a < b)
    if r > len(mult):
        return 0

    total = 0

    def extend(start, x, length, weight, visited):
        nonlocal total
        for y, m in mult[x].items():
            if y == start and length == r:
                total += weight * m
            elif y > start and y not in visited and length < r:
                visited.add(y)
                extend(start, y, length + 1, weight * m, visited)
                visited.discard(y)

    for s in range(len(mult)):
        extend(s, s, 1, 1, {s})
    # every cycle is traversed once in each direction
    return total // 2


def bfs_spanning_tree(G: Multigraph, root, exclude=frozenset()) -> frozenset:
    """Edge ids of the BFS tree from ``root`` (sorted neighbour order), skipping ``exclude``."""
    seen = {root}
    queue = deque([root])
    tree = set()
    while queue:
        x = queue.popleft()
        for oe in G.out_edges(x):
            if oe.edge in exclude or oe.terminus in seen:
                continue
            seen.add(oe.terminus)
            tree.add(oe.edge)
            queue.append(oe.terminus)
    if len(seen) != G.n_vertices:
        raise NotConnectedError("not connected")
    return frozenset(tree)


def all_bfs_spanning_trees(G: Multigraph, root, limit: int | None = None):
    """Every shortest-path spanning tree rooted at ``root``.

    Each non-root vertex picks any edge to a vertex one step closer to the
    root.  Returns None when there are more than ``limit`` such trees.
    """
    dist = G.bfs_distances(root)
    if len(dist) != G.n_vertices:
        raise NotConnectedError("not connected")
    options = []
    count = 1
    for x in G.vertices:
        if x == root:
            continue
        parents = [oe.edge for oe in G.out_edges(x) if dist[oe.terminus] == dist[x] - 1]
        options.append(parents)
        count *= len(parents)
        if limit is not None and count > limit:
            return None
    return [frozenset(choice) for choice in itertools.product(*options)]


def _connected_without(H: Multigraph, removed: set) -> bool:
    if not H.vertices:
        return True
    return len(H.bfs_distances(H.vertices[0], avoid_edges=removed)) == H.n_vertices


@dataclass(frozen=True)
class ConstrainedTree:
    tree: frozenset
    e1: OrientedEdge
    ev: OrientedEdge
    adjacent_case: bool = field(default=False)
    geodesic: bool = False  # tree paths to the root are shortest paths in H
    kept: frozenset = frozenset()  # vertices whose tree path is a shortest path


def shortest_path_tree(G: Multigraph, root, exclude=frozenset()):
    """A spanning tree whose root paths are shortest paths of G itself, using
    none of ``exclude``; None if the excluded edges make that impossible."""
    tree, geodesic = near_geodesic_tree(G, root, exclude)
    return tree if len(geodesic) == G.n_vertices else None


def near_geodesic_tree(G: Multigraph, root, exclude=frozenset()) -> tuple:
    """Spanning tree of G - exclude in which as many vertices as possible keep a
    shortest path of G to the root.

    A vertex keeps one iff it has a G-geodesic parent edge outside ``exclude``
    whose other end keeps one.  Those vertices are attached along such edges;
    the rest follow a BFS of G - exclude.  Returns ``(tree, kept vertices)``.
    """
    dist = G.bfs_distances(root)
    if len(dist) != G.n_vertices:
        raise NotConnectedError("not connected")
    kept = {root}
    tree = set()
    for x in sorted(G.vertices, key=lambda y: (dist[y], sort_key(y))):
        if x == root:
            continue
        for oe in G.out_edges(x):
            if oe.edge not in exclude and oe.terminus in kept and dist[oe.terminus] == dist[x] - 1:
                tree.add(oe.edge)
                kept.add(x)
                break
    # attach the remaining vertices by BFS over G - exclude
    reached = set(kept)
    queue = deque(sorted(kept, key=lambda y: (dist[y], sort_key(y))))
    while queue:
        x = queue.popleft()
        for oe in G.out_edges(x):
            if oe.edge in exclude or oe.terminus in reached:
                continue
            reached.add(oe.terminus)
            tree.add(oe.edge)
            queue.append(oe.terminus)
    if len(reached) != G.n_vertices:
        raise NotConnectedError("not connected after exclusions")
    return frozenset(tree), frozenset(kept)


def constrained_spanning_tree(
    H: Multigraph, alpha, v, v_tilde=None, avoid=(), strict: bool = True, with_e1: bool = True
) -> ConstrainedTree:
    """Pick oriented edges e1 -> alpha and ev -> v with H - e1 - ev connected.

    Among admissible pairs the one whose tree (:func:`near_geodesic_tree`)
    keeps the most shortest paths to ``alpha`` wins, preferring trees that
    keep all of them, then trees that keep v's; ties go to the first pair by
    (edge id, direction).

    With ``v_tilde`` the origin of ``ev`` avoids it; when ``v`` is adjacent to
    ``alpha`` the origin of ``ev`` also avoids ``alpha``.  ``avoid`` lists
    further forbidden origins for ``ev``.  ``strict=False`` skips the degree
    precondition and the adjacent-case origin rule, and only fails if no pair
    exists.  ``with_e1=False`` drops e1 and only keeps ev out of the tree.
    """
    H._check_vertex(alpha)
    H._check_vertex(v)
    if v == alpha:
        raise LemmaTreeError("lemma-tree hypotheses violated: v equals alpha")
    adjacent = H.multiplicity(alpha, v) > 0
    if strict and not (H.degree(v) >= 3 or (adjacent and H.degree(alpha) >= 3)):
        raise LemmaTreeError(
            f"lemma-tree hypotheses violated: deg {v!r} = {H.degree(v)}, "
            f"adjacent to alpha: {adjacent}, deg alpha = {H.degree(alpha)}"
        )
    banned = set(avoid)
    if v_tilde is not None:
        banned.add(v_tilde)
    into_alpha = [oe.reverse() for oe in H.out_edges(alpha)]
    into_v = [oe.reverse() for oe in H.out_edges(v)]
    into_alpha.sort(key=OrientedEdge.order)
    into_v.sort(key=OrientedEdge.order)
    if not with_e1:
        into_alpha = [None]
    best = None
    for e1 in into_alpha:
        for ev in into_v:
            removed = {ev.edge} if e1 is None else {e1.edge, ev.edge}
            if e1 is not None and e1.edge == ev.edge:
                continue
            if ev.origin in banned:
                continue
            if strict and adjacent and ev.origin == alpha:
                continue
            if not _connected_without(H, removed):
                continue
            tree, kept = near_geodesic_tree(H, alpha, removed)
            score = (len(kept) == H.n_vertices, v in kept, len(kept))
            if best is None or score > best[0]:
                best = (score, ConstrainedTree(tree, e1, ev, adjacent, score[0], kept))
    if best is not None:
        return best[1]
    raise LemmaTreeError(
        f"lemma-tree hypotheses violated: no admissible edge pair for alpha={alpha!r}, v={v!r}"
    )
