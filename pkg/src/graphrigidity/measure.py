"""Cylinder measures on the boundary of the free group and rigidity comparison.

The measure of the cylinder of a reduced word w is

    lam ** (-depth(w)) * p[final edge of w]

where depth(w) is the position of the last lift of the final edge in the
reduced walk of w.  Everything here is a consequence of that formula plus the
Perron-Frobenius pair of the non-backtracking operator.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

try:
    from numba import njit
except ImportError:  # the plain-Python kernel gives identical results, only slower
    def njit(*args, **kwargs):
        return args[0] if args and callable(args[0]) else (lambda f: f)

from .errors import BasisError, GraphRigidityError, HypothesisError, SizeBoundError
from .graph import (
    Multigraph,
    all_bfs_spanning_trees,
    betti_number,
    bfs_spanning_tree,
    distance_avoiding_edge,
)
from .iso import canonical_form, is_isomorphism, isomorphic
from .nb import PFData, build_nb_matrix, graph_pf, pf_eigenpair
from .walks import (
    CoverBall,
    WalkBasis,
    alphabet,
    build_walk_basis,
    busemann_limit,
    final_edge,
    lifted_final_edge_depth,
    overlap_table,
    universal_cover_ball,
    word_to_str,
    word_to_walk,
)

RTOL = 1e-9
LAMBDA_ATOL = 1e-9


def _check_pf(basis: WalkBasis, pf: PFData):
    if set(pf.index) != set(basis.graph.oriented_edges):
        raise BasisError("basis/pf mismatch: eigenvector is indexed by a different graph")


def cylinder_measure(word: Sequence[int], basis: WalkBasis, pf: PFData) -> float:
    _check_pf(basis, pf)
    if not word:
        raise ValueError("cylinder of the empty word is the whole boundary")
    depth = lifted_final_edge_depth(word, basis)
    return pf.lam ** (-depth) * pf.value(final_edge(word, basis))


def iter_word_walks(basis: WalkBasis, max_len: int) -> Iterator[tuple]:
    """Depth-first over reduced words up to ``max_len``.

    Yields ``(word, walk_length, lift_depth)``.  The reduced walk is kept on a
    stack and extended one generator at a time, cancelling at the junction.
    """
    letters = alphabet(basis.rank)
    code = {oe: i for i, oe in enumerate(basis.graph.oriented_edges)}  # reverse = code ^ 1
    segs = {x: [code[oe] for oe in basis.letter_walk(x)] for x in letters}
    target = {x: code[basis.letter_edge(x)] >> 1 for x in letters}
    walk: list = []
    stack = [[(), 0, None]]
    while stack:
        frame = stack[-1]
        word, i, undo = frame
        if i == len(letters) or len(word) == max_len:
            stack.pop()
            if undo is not None:
                popped, pushed = undo
                del walk[len(walk) - pushed :]
                walk.extend(reversed(popped))
            continue
        frame[1] = i + 1
        x = letters[i]
        if word and x == -word[-1]:
            continue
        seg = segs[x]
        popped = []
        k = 0
        while walk and k < len(seg) and walk[-1] == seg[k] ^ 1:
            popped.append(walk.pop())
            k += 1
        walk.extend(seg[k:])
        t = target[x]
        j = len(walk) - 1
        while walk[j] >> 1 != t:
            j -= 1
            if j < 0:
                raise BasisError("basis invariant violated: final edge cancelled")
        child = word + (x,)
        yield child, len(walk), j
        stack.append([child, 0, (popped, len(seg) - k)])


@njit(cache=True)
def _sweep_kernel(segs, seglen, target, max_len, out_letters, out_parent, out_walk, out_lift):
    """Array form of :func:`iter_word_walks`: letter i has inverse i ^ 1, edge code c
    has reverse c ^ 1.  Returns the number of words written, or -1 if a final
    edge was cancelled."""
    nl = segs.shape[0]
    width = segs.shape[1]
    walk = np.empty(max_len * width + 1, np.int64)
    popped = np.empty((max_len + 1, width), np.int64)
    npopped = np.zeros(max_len + 1, np.int64)
    npushed = np.zeros(max_len + 1, np.int64)
    nxt = np.zeros(max_len + 1, np.int64)
    node = np.full(max_len + 1, -1, np.int64)
    word = np.zeros(max_len + 1, np.int64)
    wl = 0
    count = 0
    d = 0
    while d >= 0:
        if d == max_len or nxt[d] == nl:
            if d > 0:
                wl -= npushed[d]
                for j in range(npopped[d] - 1, -1, -1):
                    walk[wl] = popped[d, j]
                    wl += 1
            d -= 1
            continue
        i = nxt[d]
        nxt[d] += 1
        if d > 0 and i == (word[d - 1] ^ 1):
            continue
        n = seglen[i]
        k = 0
        while wl > 0 and k < n and walk[wl - 1] == (segs[i, k] ^ 1):
            wl -= 1
            popped[d + 1, k] = walk[wl]
            k += 1
        for j in range(k, n):
            walk[wl] = segs[i, j]
            wl += 1
        j = wl - 1
        while j >= 0 and (walk[j] >> 1) != target[i]:
            j -= 1
        if j < 0:
            return -1
        word[d] = i
        for q in range(d + 1):
            out_letters[count, q] = word[q]
        out_parent[count] = node[d]
        out_walk[count] = wl
        out_lift[count] = j
        node[d + 1] = count
        npopped[d + 1] = k
        npushed[d + 1] = n - k
        nxt[d + 1] = 0
        count += 1
        d += 1
    return count


@dataclass(frozen=True, eq=False)
class WordSweep:
    """Every reduced word up to ``max_len`` in the pre-order of :func:`iter_word_walks`.

    ``letters`` holds signed letters padded with 0; ``parent`` is the row of
    the word with its last letter dropped (-1 for single letters).
    """

    letters: np.ndarray
    length: np.ndarray
    parent: np.ndarray
    walk_length: np.ndarray
    lift_depth: np.ndarray

    @property
    def size(self) -> int:
        return len(self.length)

    @property
    def last(self) -> np.ndarray:
        return self.letters[np.arange(self.size), self.length - 1]

    def word(self, row: int) -> tuple:
        return tuple(int(x) for x in self.letters[row, : self.length[row]])


def sweep_word_walks(basis: WalkBasis, max_len: int) -> WordSweep:
    """Walk lengths and lift depths of all reduced words up to ``max_len``, as arrays."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    letters = alphabet(basis.rank)
    code = {oe: i for i, oe in enumerate(basis.graph.oriented_edges)}
    width = max(len(basis.letter_walk(x)) for x in letters)
    segs = np.zeros((len(letters), width), np.int64)
    seglen = np.zeros(len(letters), np.int64)
    target = np.zeros(len(letters), np.int64)
    for i, x in enumerate(letters):
        walk = [code[oe] for oe in basis.letter_walk(x)]
        segs[i, : len(walk)] = walk
        seglen[i] = len(walk)
        target[i] = code[basis.letter_edge(x)] >> 1
    q = 2 * basis.rank
    total = sum(q * (q - 1) ** (n - 1) for n in range(1, max_len + 1))
    idx = np.full((total, max_len), -1, np.int64)
    parent = np.empty(total, np.int64)
    walk_len = np.empty(total, np.int64)
    lift = np.empty(total, np.int64)
    n = _sweep_kernel(segs, seglen, target, max_len, idx, parent, walk_len, lift)
    if n < 0:
        raise BasisError("basis invariant violated: final edge cancelled")
    signed = np.array(letters, np.int64)
    out = np.where(idx >= 0, signed[np.maximum(idx, 0)], 0)
    length = (idx >= 0).sum(axis=1)
    return WordSweep(out, length, parent, walk_len, lift)


def overlap_formula_lengths(basis: WalkBasis, sweep: WordSweep) -> np.ndarray:
    """Sum of generator lengths minus twice the junction overlaps s(x_j^-1, x_{j+1}),
    for every word of the sweep (compare with ``sweep.walk_length``)."""
    r = basis.rank
    lengths = np.zeros(r + 1, np.int64)
    for i, n in basis.lengths().items():
        lengths[i] = n
    S = np.zeros((2 * r + 1, 2 * r + 1), np.int64)  # indexed by letter + rank
    for (x, y), n in overlap_table(basis).items():
        S[x + r, y + r] = n
    L = sweep.letters
    total = lengths[np.abs(L)].sum(axis=1)
    a, b = L[:, :-1], L[:, 1:]
    total -= 2 * np.where(b != 0, S[r - a, b + r], 0).sum(axis=1)
    return total


def iter_cylinder_values(basis: WalkBasis, pf: PFData, max_len: int) -> Iterator[tuple]:
    """Yields ``(word, value)`` in depth-first pre-order."""
    _check_pf(basis, pf)
    p = {x: pf.value(basis.letter_edge(x)) for x in alphabet(basis.rank)}
    lam = pf.lam
    for word, _, depth in iter_word_walks(basis, max_len):
        yield word, lam ** (-depth) * p[word[-1]]


@dataclass(frozen=True, eq=False)
class CylinderMeasureTable:
    depth: int
    values: dict
    lam: float
    rank: int
    normalization: str = "pf-sum1"

    def children(self, word: tuple) -> list:
        return [word + (x,) for x in alphabet(self.rank) if not word or x != -word[-1]]

    def additivity_residual(self) -> float:
        worst = 0.0
        for w, v in self.values.items():
            if len(w) < self.depth:
                s = sum(self.values[c] for c in self.children(w))
                worst = max(worst, abs(s - v) / v)
        return worst

    def level(self, n: int) -> list:
        return [v for w, v in self.values.items() if len(w) == n]

    def to_csv(self) -> str:
        rows = ["word,depth,value"]
        for w in sorted(self.values, key=lambda w: (len(w), [(abs(x), x < 0) for x in w])):
            rows.append(f"{word_to_str(w)},{len(w)},{self.values[w]:.17g}")
        return "\n".join(rows) + "\n"


def build_measure_table(G: Multigraph, v0, tree, depth: int, pf: PFData | None = None) -> CylinderMeasureTable:
    if betti_number(G) < 2:
        raise HypothesisError("measure table needs first Betti number >= 2")
    if G.min_degree() < 2:
        raise HypothesisError("measure table needs minimum degree >= 2")
    pf = pf or graph_pf(G)
    basis = build_walk_basis(G, v0, tree)
    values = dict(iter_cylinder_values(basis, pf, depth))
    return CylinderMeasureTable(depth, values, pf.lam, basis.rank)


@dataclass
class AdditivityReport:
    max_rel_error: float = 0.0
    worst_word: tuple = ()
    checked: int = 0
    total_mass: float = 0.0


def additivity_report(basis: WalkBasis, pf: PFData, depth: int, sweep: WordSweep | None = None) -> AdditivityReport:
    """Compare every cylinder of length < depth with the sum of its children."""
    sw = sweep if sweep is not None else sweep_word_walks(basis, depth)
    values = cylinder_values(basis, pf, sw)
    inner = sw.parent >= 0
    acc = np.bincount(sw.parent[inner], weights=values[inner], minlength=sw.size)
    rep = AdditivityReport(total_mass=float(values[sw.length == 1].sum()))
    check = sw.length < depth
    if check.any():
        err = np.where(check, np.abs(acc - values) / values, -1.0)
        worst = int(np.argmax(err))
        rep.max_rel_error = float(err[worst])
        rep.worst_word = sw.word(worst)
        rep.checked = int(check.sum())
    return rep


# ---------------------------------------------------------------------------
# the closed formula with its distance term


def psm_exponent(word, basis: WalkBasis, convention: str) -> int:
    tau = final_edge(word, basis)
    end = {"origin": tau.origin, "terminus": tau.terminus}[convention]
    length = len(word_to_walk(word, basis))
    return -length + int(distance_avoiding_edge(basis.graph, tau.edge, basis.base, end))


def psm_rhs(word, basis: WalkBasis, pf: PFData, convention: str = "origin") -> float:
    """lam ** (-l(w) + d_{G - tau}(v0, endpoint(tau))) * p[tau]."""
    _check_pf(basis, pf)
    return pf.lam ** psm_exponent(word, basis, convention) * pf.value(final_edge(word, basis))


def psm_convention_report(basis: WalkBasis, pf: PFData, depth: int) -> dict:
    """Per endpoint convention, the exponent offset between the closed formula and the
    lift-depth measure, word by word.

    A convention reproduces the measure up to a global constant iff its offset
    is the same for every word; ``exact`` means that offset is 0.
    """
    _check_pf(basis, pf)
    G, r = basis.graph, basis.rank
    sw = sweep_word_walks(basis, depth)
    offsets = {}
    for conv in ("origin", "terminus"):
        d = np.zeros(2 * r + 1, np.int64)  # indexed by letter + rank
        for x in alphabet(r):
            tau = basis.letter_edge(x)
            end = tau.origin if conv == "origin" else tau.terminus
            d[x + r] = int(distance_avoiding_edge(G, tau.edge, basis.base, end))
        offsets[conv] = -sw.walk_length + d[sw.last + r] + sw.lift_depth
    out = {}
    for conv, table in offsets.items():
        values, freq = np.unique(table, return_counts=True)
        counts = {int(o): int(c) for o, c in zip(values, freq)}
        modal = min(counts, key=lambda o: (-counts[o], abs(o), o))
        mismatches = [
            {"word": word_to_str(sw.word(i)), "offset": int(table[i])}
            for i in np.flatnonzero(table != modal)
        ]
        out[conv] = {
            "consistent": len(counts) == 1,
            "exact": set(counts) == {0},
            "modal_offset": modal,
            "offset_counts": {str(k): v for k, v in sorted(counts.items())},
            "mismatches": mismatches,
        }
    matching = [c for c in ("origin", "terminus") if out[c]["consistent"]]
    return {"words": sw.size, "conventions": out, "consistent_conventions": matching}


# ---------------------------------------------------------------------------
# measures read off a cover ball


def ball_cylinder_measure(ball: CoverBall, pf: PFData, x: int, f: int) -> float:
    """mu_x(Cyl_x(f)) assembled from the boundary leaves of the ball below f.

    Each leaf edge l contributes lam ** (-d(x, o(l))) * p[l]; ``x`` must not lie
    below ``f``.
    """
    if ball.is_descendant(x, f):
        raise ValueError("base point lies inside the cylinder")
    leaves = [z for z in ball.subtree(f) if ball.depth[z] == ball.radius]
    dist = ball.distances_between(x, [ball.parent[z] for z in leaves])
    return sum(pf.lam ** (-d) * pf.value(ball.in_edge[z]) for z, d in zip(leaves, dist))


@dataclass
class EigenRelationReport:
    residual: float
    relative_residual: float
    lam: float
    w: dict = field(default_factory=dict)
    radius: int = 0


def check_eigen_relation(G: Multigraph, v0, R: int, pf: PFData | None = None) -> EigenRelationReport:
    """Build w[e] = mu_{x_e}(Cyl(e')) for a lift e' of each oriented edge, then test Tw = lam w."""
    if R < 2:
        raise ValueError("radius must be >= 2")
    T = build_nb_matrix(G)
    pf = pf or pf_eigenpair(T)
    ball = universal_cover_ball(G, v0, R)
    first = {}
    for k in range(1, ball.size):
        if ball.depth[k] < R:
            first.setdefault(ball.in_edge[k], k)
    missing = [oe for oe in T.index if oe not in first]
    if missing:
        raise ValueError(f"radius {R} too small: no interior lift of {missing[0].key}")
    w = np.array([ball_cylinder_measure(ball, pf, ball.parent[first[oe]], first[oe]) for oe in T.index])
    resid = float(np.max(np.abs(T.array @ w - pf.lam * w)))
    return EigenRelationReport(
        resid, resid / float(np.max(np.abs(w))), pf.lam, {oe.key: float(x) for oe, x in zip(T.index, w)}, R
    )


@dataclass
class ConformalityReport:
    samples: int = 0
    busemann_exact: int = 0
    max_ratio_error: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.busemann_exact == self.samples and self.max_ratio_error <= RTOL and not self.failures


def conformality_check(G: Multigraph, v0, R: int = 6, samples: int = 8, seed: int = 0,
                       pf: PFData | None = None, ball: CoverBall | None = None) -> ConformalityReport:
    """Sample adjacent base points x, y of a cover ball and an edge f beyond both.

    For each sample, B_xi(x, o(f)) from the limit definition must equal
    d(x, o(f)), and mu_x(Cyl f) / mu_y(Cyl f) must equal lam ** (-B_xi(x, y)).
    """
    pf = pf or graph_pf(G)
    ball = ball or universal_cover_ball(G, v0, R)
    rng = random.Random(seed)
    bases = [k for k in range(ball.size) if ball.depth[k] <= 2]
    edges = [k for k in range(1, ball.size) if 2 <= ball.depth[k] <= ball.radius - 2]
    rep = ConformalityReport()
    for _ in range(samples):
        x = rng.choice(bases)
        y = rng.choice(ball.neighbors(x))
        choices = [f for f in edges if not ball.is_descendant(x, f) and not ball.is_descendant(y, f)]
        if not choices:
            continue
        f = rng.choice(choices)
        rep.samples += 1
        of = ball.parent[f]
        limit = busemann_limit(ball, x, of, f)
        if limit == ball.distances_between(x, [of])[0]:
            rep.busemann_exact += 1
        else:
            rep.failures.append({"x": x, "f": f, "limit": limit})
        b = busemann_limit(ball, x, y, f)
        ratio = ball_cylinder_measure(ball, pf, x, f) / ball_cylinder_measure(ball, pf, y, f)
        rep.max_ratio_error = max(rep.max_ratio_error, abs(ratio - pf.lam ** (-b)) / pf.lam ** (-b))
    return rep


def min_eigen_radius(G: Multigraph, v0) -> int:
    """Smallest radius at which every oriented edge has a lift strictly inside the ball.

    That is one more than the longest shortest non-backtracking walk from
    ``v0`` ending in a given oriented edge.
    """
    first = {oe: 1 for oe in G.out_edges(v0)}
    queue = deque(first)
    while queue:
        oe = queue.popleft()
        for nxt in G.out_edges(oe.terminus):
            if nxt.edge != oe.edge and nxt not in first:
                first[nxt] = first[oe] + 1
                queue.append(nxt)
    if len(first) != len(G.oriented_edges):
        raise HypothesisError("some oriented edge is unreachable by non-backtracking walks")
    return max(first.values()) + 1


# ---------------------------------------------------------------------------
# fingerprints and rigidity


@dataclass(frozen=True, eq=False)
class MeasureFingerprint:
    lam: float
    rank: int
    depth: int
    levels: tuple  # per depth: sorted numpy array of rescaled cylinder values
    choices: int
    mode: str

    def differs_at(self, other: "MeasureFingerprint", rtol: float = RTOL):
        """First depth (1-based) where the value multisets differ, else None."""
        for n, (a, b) in enumerate(zip(self.levels, other.levels), start=1):
            if a.shape != b.shape or not np.allclose(a, b, rtol=rtol, atol=0.0):
                return n
        return None

    def summary(self) -> dict:
        return {
            "lambda": self.lam,
            "rank": self.rank,
            "depth": self.depth,
            "choices": self.choices,
            "mode": self.mode,
            "level_sizes": [len(x) for x in self.levels],
        }


def cylinder_values(basis: WalkBasis, pf: PFData, sweep: WordSweep) -> np.ndarray:
    """Cylinder measure of every word of ``sweep``, vectorised."""
    _check_pf(basis, pf)
    r = basis.rank
    p = np.zeros(2 * r + 1)  # indexed by letter + rank
    for x in alphabet(r):
        p[x + r] = pf.value(basis.letter_edge(x))
    return pf.lam ** (-sweep.lift_depth.astype(float)) * p[sweep.last + r]


def _rescaled_levels(basis: WalkBasis, pf: PFData, depth: int) -> list:
    sw = sweep_word_walks(basis, depth)
    values = cylinder_values(basis, pf, sw)
    scale = values[sw.length == 1].sum()
    return [values[sw.length == n] / scale for n in range(1, depth + 1)]


def basis_choices(G: Multigraph, max_choices: int = 5000):
    """Every (base vertex, BFS spanning tree) pair, or one canonical pair if too many."""
    total = 0
    per_vertex = []
    for v0 in G.vertices:
        trees = all_bfs_spanning_trees(G, v0, limit=max_choices)
        if trees is None:
            break
        total += len(trees)
        if total > max_choices:
            break
        per_vertex.append((v0, trees))
    else:
        return "all", [(v0, t) for v0, trees in per_vertex for t in trees]
    # edge ids follow the canonical vertex ranks so the BFS tie-breaks are canonical too
    order = canonical_form(G).order
    rank = {x: i for i, x in enumerate(order)}
    pairs = sorted(tuple(sorted((rank[u], rank[v]))) for _, u, v in G.edges)
    H = Multigraph(range(G.n_vertices), [(i, u, v) for i, (u, v) in enumerate(pairs)])
    return "canonical", [(H, 0, bfs_spanning_tree(H, 0))]


def measure_fingerprint(G: Multigraph, depth: int, pf: PFData | None = None, max_choices: int = 5000) -> MeasureFingerprint:
    b = betti_number(G)
    if b < 2:
        raise HypothesisError("fingerprint needs first Betti number >= 2")
    pf = pf or graph_pf(G)
    mode, choices = basis_choices(G, max_choices)
    levels = [[] for _ in range(depth)]
    for choice in choices:
        if mode == "all":
            v0, tree = choice
            basis, pfc = build_walk_basis(G, v0, tree), pf
        else:
            H, v0, tree = choice
            basis, pfc = build_walk_basis(H, v0, tree), graph_pf(H)
        for n, lv in enumerate(_rescaled_levels(basis, pfc, depth)):
            levels[n].append(lv)
    return MeasureFingerprint(
        pf.lam, b, depth, tuple(np.sort(np.concatenate(lv)) for lv in levels), len(choices), mode
    )


@dataclass
class Verdict:
    verdict: str  # consistent | distinguished | inconclusive
    reason: str
    witness: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        witness = dict(self.witness)
        if "vertex_map" in witness:
            witness["vertex_map"] = {str(k): str(v) for k, v in witness["vertex_map"].items()}
        return {"verdict": self.verdict, "reason": self.reason, "witness": witness}


def _require_rigidity_hypotheses(G: Multigraph, name: str):
    G.require_connected()
    if G.min_degree() < 3:
        raise HypothesisError(f"{name}: minimal degree {G.min_degree()} < 3")
    if betti_number(G) < 2:
        raise HypothesisError(f"{name}: first Betti number must exceed 1")


class RigidityProfile:
    """Per-graph data for the comparator; the fingerprint is built on first use."""

    def __init__(self, G: Multigraph, depth: int = 3, name: str = "graph"):
        _require_rigidity_hypotheses(G, name)
        self.graph = G
        self.depth = depth
        self.betti = betti_number(G)
        self.pf = graph_pf(G)
        self.dimension = math.log(self.pf.lam)
        self._fingerprint = None

    @property
    def fingerprint(self) -> MeasureFingerprint:
        if self._fingerprint is None:
            self._fingerprint = measure_fingerprint(self.graph, self.depth, self.pf)
        return self._fingerprint


def compare_profiles(P: RigidityProfile, Q: RigidityProfile, iso_bound: int = 12) -> Verdict:
    if P.betti != Q.betti:
        return Verdict("distinguished", "betti", {"betti": [P.betti, Q.betti]})
    if abs(P.dimension - Q.dimension) > LAMBDA_ATOL:
        return Verdict(
            "distinguished", "dimension",
            {"dimension": [P.dimension, Q.dimension], "gap": abs(P.dimension - Q.dimension)},
        )
    if P.depth != Q.depth:
        raise ValueError("profiles built to different depths")
    fg, fh = P.fingerprint, Q.fingerprint
    if fg.mode != fh.mode or fg.choices != fh.choices:
        return Verdict(
            "distinguished", "basis-choices",
            {"choices": [fg.choices, fh.choices], "modes": [fg.mode, fh.mode]},
        )
    n = fg.differs_at(fh)
    if n is not None:
        a, b = fg.levels[n - 1], fh.levels[n - 1]
        witness = {"depth": n, "sizes": [len(a), len(b)]}
        if a.shape == b.shape:
            i = int(np.argmax(np.abs(a - b) / np.maximum(a, b)))
            witness.update(index=i, values=[float(a[i]), float(b[i])])
        return Verdict("distinguished", "fingerprint", witness)
    G, H = P.graph, Q.graph
    try:
        iso, mapping = isomorphic(G, H, bound=iso_bound)
    except SizeBoundError as exc:
        return Verdict("inconclusive", f"fingerprints agree to depth {P.depth}; {exc}")
    if iso:
        if not is_isomorphism(G, H, mapping):
            raise GraphRigidityError("isomorphism search returned a map that is not an isomorphism")
        return Verdict("consistent", "isomorphism", {"vertex_map": mapping})
    return Verdict(
        "inconclusive",
        f"fingerprints agree to depth {P.depth} but no isomorphism exists; finite truncation cannot decide",
    )


def rigidity_compare(G: Multigraph, H: Multigraph, depth: int = 3, iso_bound: int = 12) -> Verdict:
    """Compare two graphs through the dimension and fingerprints of their boundary measures.

    Never answers "consistent" without a checked isomorphism witness.
    """
    return compare_profiles(
        RigidityProfile(G, depth, "first graph"), RigidityProfile(H, depth, "second graph"), iso_bound
    )
