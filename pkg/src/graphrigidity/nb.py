"""Non-backtracking edge adjacency operator and its Perron-Frobenius pair."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, NotIrreducibleError
from .graph import Multigraph, OrientedEdge, betti_number

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class NBMatrix:
    """0/1 matrix on oriented edges: entry (a, b) is 1 iff t(a) = o(b) and b != reverse(a)."""

    index: tuple
    array: np.ndarray
    graph: Multigraph

    @property
    def dimension(self) -> int:
        return len(self.index)

    def position(self, oe: OrientedEdge) -> int:
        return self._positions[oe]

    @property
    def _positions(self) -> dict:
        cached = self.__dict__.get("_pos")
        if cached is None:
            cached = {oe: i for i, oe in enumerate(self.index)}
            object.__setattr__(self, "_pos", cached)
        return cached

    def entry(self, a: OrientedEdge, b: OrientedEdge) -> int:
        return int(self.array[self.position(a), self.position(b)])


def build_nb_matrix(G: Multigraph) -> NBMatrix:
    b = betti_number(G)
    if b < 2:
        raise NotIrreducibleError(f"operator not irreducible: first Betti number {b} < 2")
    if G.min_degree() < 2:
        raise NotIrreducibleError("operator not irreducible: graph has a vertex of degree 1")
    index = G.oriented_edges
    pos = {oe: i for i, oe in enumerate(index)}
    T = np.zeros((len(index), len(index)))
    for a in index:
        for nxt in G.out_edges(a.terminus):
            if nxt.edge != a.edge:
                T[pos[a], pos[nxt]] = 1.0
    T.setflags(write=False)
    return NBMatrix(index, T, G)


@dataclass(frozen=True, eq=False)
class PFData:
    lam: float
    p: np.ndarray
    residual: float
    index: tuple
    iterations: int = 0
    normalization: str = "sum1"

    def value(self, oe: OrientedEdge) -> float:
        return float(self.p[self._positions[oe]])

    @property
    def _positions(self) -> dict:
        cached = self.__dict__.get("_pos")
        if cached is None:
            cached = {oe: i for i, oe in enumerate(self.index)}
            object.__setattr__(self, "_pos", cached)
        return cached

    def as_dict(self) -> dict:
        return {oe.key: float(x) for oe, x in zip(self.index, self.p)}


def pf_eigenpair(T: NBMatrix, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> PFData:
    """Power iteration on T + I from the all-ones vector.

    The shift removes any periodicity of T without moving the Perron vector.
    Stops once ||Tp - lam p||_inf <= tol with p normalised to sum 1.
    """
    A = np.asarray(T.array)
    n = A.shape[0]
    x = np.full(n, 1.0 / n)
    residual = math.inf
    for it in range(1, max_iter + 1):
        y = A @ x + x
        x = y / y.sum()
        Tx = A @ x
        lam = float(Tx.sum())
        residual = float(np.max(np.abs(Tx - lam * x)))
        if residual <= tol:
            break
    else:
        raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations", residual)
    if np.any(x <= 0):
        raise NotIrreducibleError("Perron vector has non-positive entries")
    x.setflags(write=False)
    return PFData(lam, x, residual, T.index, it)


def graph_pf(G: Multigraph, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> PFData:
    return pf_eigenpair(build_nb_matrix(G), tol, max_iter)


def ps_dimension(pf: PFData) -> float:
    return math.log(pf.lam)
