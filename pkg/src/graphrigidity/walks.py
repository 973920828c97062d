"""Closed walks, free-group words and the universal covering tree.

A word is a tuple of non-zero ints: ``i`` stands for the i-th generator walk
and ``-i`` for its reverse.  Words are read left to right, so ``(1, -2)``
walks the first generator and then the second one backwards.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, NamedTuple, Sequence

from .errors import BasisError, GraphRigidityError, NotConnectedError
from .graph import Multigraph, OrientedEdge


# ---------------------------------------------------------------------------
# words


def is_reduced(word: Sequence[int]) -> bool:
    return all(a != -b for a, b in zip(word, word[1:])) and 0 not in word


def check_word(word: Sequence[int], rank: int) -> tuple:
    word = tuple(word)
    if not is_reduced(word):
        raise ValueError(f"word {word} is not reduced")
    if any(abs(x) > rank for x in word):
        raise ValueError(f"word {word} uses a letter beyond rank {rank}")
    return word


def alphabet(rank: int) -> tuple:
    return tuple(x for i in range(1, rank + 1) for x in (i, -i))


def iter_reduced_words(rank: int, max_len: int, min_len: int = 1) -> Iterator[tuple]:
    """All reduced words with ``min_len <= len <= max_len``, shortest first."""
    letters = alphabet(rank)
    level = [()]
    for n in range(1, max_len + 1):
        level = [w + (x,) for w in level for x in letters if not w or w[-1] != -x]
        if n >= min_len:
            yield from level


def count_reduced_words(rank: int, n: int) -> int:
    return 2 * rank * (2 * rank - 1) ** (n - 1) if n > 0 else 1


def word_to_str(word: Sequence[int]) -> str:
    return " ".join(str(x) for x in word)


# ---------------------------------------------------------------------------
# walks


class ClosedWalk(NamedTuple):
    base: object
    edges: tuple

    def __len__(self):
        return len(self.edges)


def reverse_walk(edges: Sequence[OrientedEdge]) -> tuple:
    return tuple(oe.reverse() for oe in reversed(edges))


def is_walk(edges: Sequence[OrientedEdge]) -> bool:
    return all(a.terminus == b.origin for a, b in zip(edges, edges[1:]))


def is_nonbacktracking(edges: Sequence[OrientedEdge]) -> bool:
    return all(b != a.reverse() for a, b in zip(edges, edges[1:]))


def naive_reduce(edges: Sequence[OrientedEdge]) -> tuple:
    """Delete adjacent (e, reverse e) pairs anywhere until none is left."""
    edges = list(edges)
    changed = True
    while changed:
        changed = False
        for i in range(len(edges) - 1):
            if edges[i + 1] == edges[i].reverse():
                del edges[i : i + 2]
                changed = True
                break
    return tuple(edges)


def concatenate(left: Sequence[OrientedEdge], right: Sequence[OrientedEdge]) -> tuple:
    """Join two reduced walks, cancelling at the junction."""
    out = list(left)
    k = 0
    while out and k < len(right) and right[k] == out[-1].reverse():
        out.pop()
        k += 1
    out.extend(right[k:])
    return tuple(out)


def start_overlap(wa, wb) -> int:
    """Length of the common initial segment of two walks from the same base."""
    if isinstance(wa, ClosedWalk) and isinstance(wb, ClosedWalk):
        if wa.base != wb.base:
            raise ValueError(f"walks based at {wa.base!r} and {wb.base!r}")
        wa, wb = wa.edges, wb.edges
    n = 0
    for a, b in zip(wa, wb):
        if a != b:
            break
        n += 1
    return n


@dataclass(frozen=True)
class WalkBasis:
    """Generator closed walks for a spanning tree.

    ``edges[i]`` is the oriented non-tree edge of generator ``i + 1`` and
    ``generators[i]`` its walk: tree path to the origin, the edge, tree path home.
    """

    graph: Multigraph
    base: object
    tree: frozenset
    edges: tuple
    generators: tuple

    @property
    def rank(self) -> int:
        return len(self.edges)

    def letter_walk(self, x: int) -> tuple:
        return self._letter_walks[x]

    @cached_property
    def _letter_walks(self) -> dict:
        out = {}
        for i, g in enumerate(self.generators, start=1):
            out[i] = g
            out[-i] = reverse_walk(g)
        return out

    def letter_edge(self, x: int) -> OrientedEdge:
        e = self.edges[abs(x) - 1]
        return e if x > 0 else e.reverse()

    def distinguished_position(self, x: int) -> int:
        """Index of the generator's non-tree edge inside ``letter_walk(x)``."""
        return self._positions[x]

    @cached_property
    def _positions(self) -> dict:
        return {x: self._letter_walks[x].index(self.letter_edge(x)) for x in self._letter_walks}

    def lengths(self) -> dict:
        return {i: len(g) for i, g in enumerate(self.generators, start=1)}

    def tail_length(self, x: int) -> int:
        """Edges after the non-tree edge in ``letter_walk(x)``."""
        return len(self.letter_walk(x)) - 1 - self.distinguished_position(x)

    def generator_of(self, edge_id) -> int:
        for i, oe in enumerate(self.edges, start=1):
            if oe.edge == edge_id:
                return i
        raise KeyError(edge_id)


def tree_paths(G: Multigraph, root, tree: frozenset) -> dict:
    """Map each vertex to the oriented-edge path from ``root`` inside ``tree``."""
    paths = {root: ()}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for oe in G.out_edges(x):
            if oe.edge in tree and oe.terminus not in paths:
                paths[oe.terminus] = paths[x] + (oe,)
                queue.append(oe.terminus)
    return paths


def build_walk_basis(G: Multigraph, v0, tree, orientations: dict | None = None) -> WalkBasis:
    """Tree-path generators based at ``v0``; non-tree edges taken in edge-id order.

    ``orientations`` optionally maps a non-tree edge id to True (declared
    direction, the default) or False.
    """
    G._check_vertex(v0)
    tree = frozenset(tree)
    for e in tree:
        G.endpoints(e)
    if len(tree) != G.n_vertices - 1:
        raise BasisError(f"tree has {len(tree)} edges, expected {G.n_vertices - 1}")
    paths = tree_paths(G, v0, tree)
    if len(paths) != G.n_vertices:
        raise BasisError("tree does not span the graph")
    orientations = orientations or {}
    edges, gens = [], []
    for e in G.edge_ids:
        if e in tree:
            continue
        oe = G.oriented(e, orientations.get(e, True))
        walk = paths[oe.origin] + (oe,) + reverse_walk(paths[oe.terminus])
        edges.append(oe)
        gens.append(walk)
    return WalkBasis(G, v0, tree, tuple(edges), tuple(gens))


def word_to_walk(word: Sequence[int], basis: WalkBasis) -> ClosedWalk:
    check_word(word, basis.rank)
    walk: tuple = ()
    for x in word:
        walk = concatenate(walk, basis.letter_walk(x))
    return ClosedWalk(basis.base, walk)


def overlap_table(basis: WalkBasis) -> dict:
    """s(x, y) = common prefix length of the walks of letters x and y."""
    letters = alphabet(basis.rank)
    return {
        (x, y): start_overlap(basis.letter_walk(x), basis.letter_walk(y)) for x in letters for y in letters
    }


class MissingOverlapError(GraphRigidityError, KeyError):
    pass


def word_length_via_overlaps(word: Sequence[int], lengths: dict, overlaps: dict) -> int:
    """Sum of generator lengths minus twice the junction overlaps s(x_j^-1, x_{j+1})."""
    total = 0
    for x in word:
        try:
            total += lengths[abs(x)]
        except KeyError:
            raise MissingOverlapError(f"no length for generator {abs(x)}") from None
    for a, b in zip(word, word[1:]):
        try:
            total -= 2 * overlaps[(-a, b)]
        except KeyError:
            raise MissingOverlapError(f"no overlap entry for ({-a}, {b})") from None
    return total


def final_edge(word: Sequence[int], basis: WalkBasis) -> OrientedEdge:
    if not word:
        raise ValueError("the empty word has no final edge")
    return basis.letter_edge(word[-1])


def _last_lift(walk: Sequence[OrientedEdge], tau: OrientedEdge, directed: bool) -> int:
    for j in range(len(walk) - 1, -1, -1):
        if walk[j].edge == tau.edge and (not directed or walk[j] == tau):
            return j
    raise BasisError("basis invariant violated: final edge missing from reduced walk")


def lifted_final_edge_depth(word: Sequence[int], basis: WalkBasis, directed: bool = False) -> int:
    """Depth in the cover of the near endpoint of the last lift of the final edge.

    By default the last traversal in either direction counts; ``directed``
    restricts to traversals in the direction of the final edge.
    """
    tau = final_edge(word, basis)
    walk = word_to_walk(word, basis).edges
    return _last_lift(walk, tau, directed)


def lift_conventions_agree(word: Sequence[int], basis: WalkBasis) -> bool:
    tau = final_edge(word, basis)
    walk = word_to_walk(word, basis).edges
    return _last_lift(walk, tau, False) == _last_lift(walk, tau, True)


# ---------------------------------------------------------------------------
# universal covering tree


@dataclass(frozen=True, eq=False)
class CoverBall:
    """Ball of radius R around the root of the universal covering tree.

    Node ``k`` is the non-backtracking walk ``walk(k)`` from the base vertex;
    node 0 is the root.  The tree edge into node k projects to ``in_edge[k]``.
    """

    graph: Multigraph
    base: object
    radius: int
    parent: tuple
    in_edge: tuple
    depth: tuple
    projection: tuple
    children: tuple

    @property
    def size(self) -> int:
        return len(self.parent)

    def walk(self, k: int) -> tuple:
        out = []
        while k:
            out.append(self.in_edge[k])
            k = self.parent[k]
        return tuple(reversed(out))

    def node_of_walk(self, edges: Sequence[OrientedEdge]) -> int:
        k = 0
        for oe in edges:
            for c in self.children[k]:
                if self.in_edge[c] == oe:
                    k = c
                    break
            else:
                raise KeyError(f"walk leaves the ball or backtracks at {oe}")
        return k

    def neighbors(self, k: int) -> list:
        out = list(self.children[k])
        if k:
            out.append(self.parent[k])
        return out

    def distances_from(self, k: int) -> list:
        """BFS distances over the undirected tree edges of the ball."""
        dist = [-1] * self.size
        dist[k] = 0
        queue = deque([k])
        while queue:
            x = queue.popleft()
            for y in self.neighbors(x):
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    def distances_between(self, x: int, nodes) -> list:
        """Tree distances from ``x`` to each of ``nodes`` through their common ancestor."""
        up = {}
        k, h = x, 0
        while True:
            up[k] = h
            if k == 0:
                break
            k, h = self.parent[k], h + 1
        out = []
        for z in nodes:
            k, h = z, 0
            while k not in up:
                k, h = self.parent[k], h + 1
            out.append(h + up[k])
        return out

    def is_descendant(self, k: int, ancestor: int) -> bool:
        while k and k != ancestor:
            k = self.parent[k]
        return k == ancestor

    def subtree(self, k: int) -> list:
        out, stack = [], [k]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(self.children[x])
        return out

    def edge_list(self) -> list:
        return [(self.parent[k], k, self.in_edge[k]) for k in range(1, self.size)]

    def is_tree(self) -> bool:
        return len(self.edge_list()) == self.size - 1 and all(d >= 0 for d in self.distances_from(0))


def universal_cover_ball(G: Multigraph, v0, R: int) -> CoverBall:
    G._check_vertex(v0)
    if G.min_degree() < 2:
        raise GraphRigidityError("universal cover ball needs minimum degree >= 2 (graph has ends)")
    if not G.is_connected():
        raise NotConnectedError("not connected")
    parent, in_edge, depth, proj, children = [0], [None], [0], [v0], [[]]
    frontier = [0]
    for d in range(1, R + 1):
        nxt = []
        for k in frontier:
            back = in_edge[k].reverse() if k else None
            for oe in G.out_edges(proj[k]):
                if oe == back:
                    continue
                c = len(parent)
                parent.append(k)
                in_edge.append(oe)
                depth.append(d)
                proj.append(oe.terminus)
                children.append([])
                children[k].append(c)
                nxt.append(c)
        frontier = nxt
    return CoverBall(
        G, v0, R, tuple(parent), tuple(in_edge), tuple(depth), tuple(proj),
        tuple(tuple(c) for c in children),
    )


def busemann_limit(ball: CoverBall, x: int, y: int, f: int) -> int:
    """lim d(x, z) - d(y, z) over the deepest ball vertices z below tree edge ``f``.

    Raises if the sampled differences are not all equal.
    """
    below = ball.subtree(f)
    deepest = max(ball.depth[z] for z in below)
    far = [z for z in below if ball.depth[z] == deepest]
    values = {a - b for a, b in zip(ball.distances_between(x, far), ball.distances_between(y, far))}
    if len(values) != 1:
        raise GraphRigidityError(f"Busemann differences not constant beyond node {f}: {sorted(values)}")
    return values.pop()


def busemann_on_cylinder(ball: CoverBall, f: int, x: int) -> int:
    """B_xi(x, o(f)) for ends xi through tree edge f (given by its child node).

    Equals d(x, o(f)); computed from the limit definition and checked
    against the direct distance.
    """
    if f == 0:
        raise ValueError("node 0 is the root, not an edge")
    if ball.is_descendant(x, f):
        raise ValueError("x lies beyond f; the cylinder is not seen from x")
    of = ball.parent[f]
    value = busemann_limit(ball, x, of, f)
    direct = ball.distances_between(x, [of])[0]
    if value != direct:
        raise GraphRigidityError(f"Busemann limit {value} differs from d(x, o(f)) = {direct}")
    return value
