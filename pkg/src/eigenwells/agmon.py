"""Agmon weight and discrete Agmon distances on the grid.

For a shift mu >= 0 the weight is w_i = max(W_i - mu, 0) with W = 1/u the
effective potential.  A grid edge (i, j) along axis k costs

    h * sqrt(b_k) * (sqrt(w_i) + sqrt(w_j)) / 2,
    b_k = (1/a_i[k] + 1/a_j[k]) / 2,

the trapezoid rule for the line integral of sqrt(w / a) along the edge.  The
distance from a node to a source set is the exact shortest-path distance in
this edge-weighted graph (Dijkstra; zero-cost edges inside the zero set of w
are genuine edges).  An optional "diagonal" stencil in 2D adds the two cell
diagonals with edge length h * sqrt(2) and b averaged over both axes, which
tightens the metric's grid anisotropy.

Distances are label-setting exact, so the values do not depend on tie order;
the returned nearest-source labels resolve exact ties by scipy's fixed
traversal order, which is deterministic for a given graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .errors import EmptySourceSet, NegativeLevel, OverlappingComponents
from .grid import GridSpec, as_index_set
from .landscape import Landscape

__all__ = [
    "AgmonWeight",
    "DistanceField",
    "agmon_weight",
    "build_cost_graph",
    "distance_to_set",
    "pairwise_separation",
    "STENCIL_AXIS",
    "STENCIL_DIAGONAL",
]

STENCIL_AXIS = "axis"
STENCIL_DIAGONAL = "diagonal"


@dataclass(frozen=True)
class AgmonWeight:
    """Clamped shifted potential w = max(W - mu, 0) plus metric coefficients."""

    grid: GridSpec
    mu: float
    w: np.ndarray
    inv_a: np.ndarray  # (n, dim)

    def zero_set(self) -> np.ndarray:
        """Indices where the weight vanishes, i.e. the sublevel set {W <= mu}."""
        return np.flatnonzero(self.w == 0.0).astype(np.int64)


def agmon_weight(landscape: Landscape, mu: float) -> AgmonWeight:
    """Build the Agmon weight at shift ``mu`` from a full-grid landscape."""
    if mu < 0.0:
        raise NegativeLevel(f"mu must be nonnegative, got {mu}")
    op = landscape.op
    if op.coeffs is None:
        raise ValueError("Agmon weight needs a full-grid operator with coefficients")
    w = np.maximum(landscape.W - mu, 0.0)
    return AgmonWeight(grid=op.grid, mu=float(mu), w=w, inv_a=1.0 / op.coeffs.a)


def _diagonal_pairs(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Endpoint indices of both cell diagonals of a 2D grid."""
    arr = grid._index_grid  # arr[i1, i0]
    pairs_a, pairs_b = [], []
    for step1 in (1, -1):
        if grid.topology == "torus":
            a = arr
            b = np.roll(np.roll(arr, -1, axis=1), -step1, axis=0)
        else:
            n1, n0 = arr.shape
            if step1 == 1:
                a = arr[: n1 - 1, : n0 - 1]
                b = arr[1:, 1:]
            else:
                a = arr[1:, : n0 - 1]
                b = arr[: n1 - 1, 1:]
        pairs_a.append(a.ravel())
        pairs_b.append(b.ravel())
    return np.concatenate(pairs_a), np.concatenate(pairs_b)


def _edge_costs(weight: AgmonWeight, stencil: str):
    grid = weight.grid
    h = grid.h
    sw = np.sqrt(weight.w)
    ei, ej, eax = grid.edge_arrays
    b = 0.5 * (weight.inv_a[ei, eax] + weight.inv_a[ej, eax])
    cost = h * np.sqrt(b) * 0.5 * (sw[ei] + sw[ej])
    if stencil == STENCIL_AXIS:
        return ei, ej, cost
    if stencil != STENCIL_DIAGONAL:
        raise ValueError(f"unknown stencil {stencil!r}")
    if grid.dim != 2:
        raise ValueError("diagonal stencil requires a 2D grid")
    di, dj = _diagonal_pairs(grid)
    bd = 0.25 * (
        weight.inv_a[di, 0] + weight.inv_a[di, 1] + weight.inv_a[dj, 0] + weight.inv_a[dj, 1]
    )
    dcost = h * np.sqrt(2.0) * np.sqrt(bd) * 0.5 * (sw[di] + sw[dj])
    return (
        np.concatenate([ei, di]),
        np.concatenate([ej, dj]),
        np.concatenate([cost, dcost]),
    )


def build_cost_graph(weight: AgmonWeight, stencil: str = STENCIL_AXIS) -> sp.csr_matrix:
    """Symmetric CSR cost matrix; explicit zeros are genuine zero-cost edges."""
    n = weight.grid.node_count
    ei, ej, cost = _edge_costs(weight, stencil)
    rows = np.concatenate([ei, ej])
    cols = np.concatenate([ej, ei])
    data = np.concatenate([cost, cost])
    return sp.csr_matrix((data, (rows, cols)), shape=(n, n))


@dataclass(frozen=True)
class DistanceField:
    """Multi-source Agmon distances h_i = rho_mu(x_i, sources)."""

    grid: GridSpec
    mu: float
    stencil: str
    sources: np.ndarray
    h: np.ndarray
    nearest_source: np.ndarray | None = None


def distance_to_set(
    weight: AgmonWeight,
    sources,
    stencil: str = STENCIL_AXIS,
    graph: sp.csr_matrix | None = None,
    want_nearest: bool = False,
) -> DistanceField:
    """Exact shortest-path distance from every node to the source set.

    Unreachable nodes (possible on restricted or box graphs) get +inf.
    Pass a prebuilt ``graph`` from :func:`build_cost_graph` to amortize
    construction over repeated calls at the same weight.
    """
    src = as_index_set(sources, weight.grid.node_count, allow_empty=True)
    if src.size == 0:
        raise EmptySourceSet("distance_to_set needs at least one source node")
    if graph is None:
        graph = build_cost_graph(weight, stencil)
    if want_nearest:
        dist, _, nearest = _csgraph_dijkstra(
            graph, directed=True, indices=src, min_only=True, return_predecessors=True
        )
        nearest = nearest.astype(np.int64)
        nearest[src] = src  # sources own themselves
    else:
        dist = _csgraph_dijkstra(graph, directed=True, indices=src, min_only=True)
        nearest = None
    return DistanceField(
        grid=weight.grid,
        mu=weight.mu,
        stencil=stencil,
        sources=src,
        h=dist,
        nearest_source=nearest,
    )


def pairwise_separation(
    weight: AgmonWeight,
    components: list[np.ndarray],
    stencil: str = STENCIL_AXIS,
    graph: sp.csr_matrix | None = None,
) -> np.ndarray:
    """Matrix of Agmon distances between disjoint node sets.

    Entry (l, l') is min over x in component l' of rho(x, component l);
    the graph is undirected so the matrix is symmetric by construction
    (each pair is computed once, from the lower-indexed side).
    """
    n = weight.grid.node_count
    comps = [as_index_set(c, n) for c in components]
    seen = np.zeros(n, dtype=bool)
    for c in comps:
        if np.any(seen[c]):
            raise OverlappingComponents("component lists share a node")
        seen[c] = True
    r = len(comps)
    sep = np.zeros((r, r))
    if r == 1:
        return sep
    if graph is None:
        graph = build_cost_graph(weight, stencil)
    for l in range(r - 1):
        field = distance_to_set(weight, comps[l], stencil, graph=graph)
        for lp in range(l + 1, r):
            val = float(field.h[comps[lp]].min())
            sep[l, lp] = val
            sep[lp, l] = val
    return sep
