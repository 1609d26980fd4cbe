"""Sublevel sets of the effective potential and Agmon-separated well partitions.

The partition at threshold mu_bar with margin delta starts from the sublevel
set E = {W <= mu_bar + delta}, splits it into grid-connected components,
optionally merges components whose mutual Agmon distance (at shift mu_bar)
falls below ``merge_threshold`` (transitively), and surrounds each resulting
cluster l with the neighborhood

    Omega_l = connected part, through the grid, of {x : rho(x, E_l) < S_bar/2}
              that meets E_l,

where S_bar is the minimum pairwise cluster separation.  The strict radius
S_bar/2 makes the neighborhoods disjoint: a node within S_bar/2 of two
clusters would put the clusters closer than S_bar.  With a single cluster
S_bar is +inf (recorded as a warning) and Omega covers everything reachable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _cc

from .agmon import AgmonWeight, agmon_weight, build_cost_graph, distance_to_set, pairwise_separation
from .errors import EmptyWellSet, NegativeLevel
from .grid import GridSpec, as_index_set
from .landscape import Landscape

__all__ = ["WellPartition", "sublevel_set", "components", "build_partition"]


def sublevel_set(landscape: Landscape, nu: float) -> np.ndarray:
    """Indices of {W <= nu}; may be empty."""
    if nu < 0.0:
        raise NegativeLevel(f"nu must be nonnegative, got {nu}")
    return np.flatnonzero(landscape.W <= nu).astype(np.int64)


def components(grid: GridSpec, indices) -> list[np.ndarray]:
    """Grid-connected components of an index set, ordered by smallest member."""
    idx = as_index_set(indices, grid.node_count, allow_empty=True)
    if idx.size == 0:
        return []
    lookup = np.full(grid.node_count, -1, dtype=np.int64)
    lookup[idx] = np.arange(idx.size)
    ei, ej, _ = grid.edge_arrays
    li, lj = lookup[ei], lookup[ej]
    keep = (li >= 0) & (lj >= 0)
    adj = sp.csr_matrix(
        (np.ones(keep.sum()), (li[keep], lj[keep])), shape=(idx.size, idx.size)
    )
    ncomp, labels = _cc(adj, directed=False)
    out = [idx[labels == c] for c in range(ncomp)]
    out.sort(key=lambda c: int(c[0]))
    return out


@dataclass(frozen=True)
class WellPartition:
    """Clusters of the sublevel set with separations and neighborhoods.

    ``rho_fields[l]`` is the full-grid Agmon distance (shift mu_bar) to
    cluster l; ``omegas[l]`` the disjoint neighborhood around cluster l.
    ``single_cluster`` means S_bar carries the +inf sentinel.
    """

    landscape: Landscape
    mu_bar: float
    delta: float
    nu: float
    merge_threshold: float
    stencil: str
    weight: AgmonWeight
    E: np.ndarray
    comps: list[np.ndarray]
    clusters: list[np.ndarray]
    separation: np.ndarray
    S_bar: float
    omegas: list[np.ndarray]
    rho_fields: list[np.ndarray]
    warnings: tuple[str, ...] = ()

    @property
    def cluster_count(self) -> int:
        return len(self.clusters)

    @property
    def single_cluster(self) -> bool:
        return len(self.clusters) == 1

    def validate(self, rtol: float = 1e-12) -> None:
        """Assert the structural invariants (used by tests)."""
        half = self.S_bar / 2.0
        owner = np.full(self.landscape.op.grid.node_count, -1, dtype=np.int64)
        for l, om in enumerate(self.omegas):
            assert np.all(owner[om] == -1), "omegas overlap"
            owner[om] = l
            assert np.all(np.isin(self.clusters[l], om)), "cluster not inside omega"
            assert np.all(self.rho_fields[l][om] < half), "omega node beyond S_bar/2"
            for lp in range(len(self.clusters)):
                if lp != l and np.isfinite(half):
                    d_other = self.rho_fields[lp][om]
                    assert np.all(d_other >= half * (1.0 - rtol)), (
                        "omega node closer than S_bar/2 to a foreign cluster"
                    )


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def build_partition(
    landscape: Landscape,
    mu_bar: float,
    delta: float,
    merge_threshold: float = 0.0,
    stencil: str = "axis",
) -> WellPartition:
    """Partition the domain into Agmon-separated wells at threshold mu_bar.

    Raises:
        NegativeLevel: mu_bar < 0 or delta <= 0 or merge_threshold < 0.
        EmptyWellSet: the sublevel set at mu_bar + delta is empty.
    """
    if mu_bar < 0.0:
        raise NegativeLevel(f"mu_bar must be nonnegative, got {mu_bar}")
    if delta <= 0.0:
        raise NegativeLevel(f"delta must be positive, got {delta}")
    if merge_threshold < 0.0:
        raise NegativeLevel(f"merge_threshold must be nonnegative, got {merge_threshold}")
    warnings: list[str] = []
    op = landscape.op
    grid = op.grid
    nu = mu_bar + delta
    if nu > op.v_bar:
        warnings.append("nu_exceeds_v_bar")
    E = sublevel_set(landscape, nu)
    if E.size == 0:
        raise EmptyWellSet(f"sublevel set at nu={nu} is empty")
    comps = components(grid, E)
    weight = agmon_weight(landscape, mu_bar)
    graph = build_cost_graph(weight, stencil)

    if merge_threshold > 0.0 and len(comps) > 1:
        comp_sep = pairwise_separation(weight, comps, stencil, graph=graph)
        uf = _UnionFind(len(comps))
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                if comp_sep[i, j] < merge_threshold:
                    uf.union(i, j)
        groups: dict[int, list[int]] = {}
        for i in range(len(comps)):
            groups.setdefault(uf.find(i), []).append(i)
        clusters = [
            np.sort(np.concatenate([comps[i] for i in members]))
            for members in groups.values()
        ]
        clusters.sort(key=lambda c: int(c[0]))
        # cluster separation is the min over cross pairs of component separation
        cmap = {}
        for l, cl in enumerate(clusters):
            for i, comp in enumerate(comps):
                if comp[0] in cl:
                    cmap.setdefault(l, []).append(i)
        r = len(clusters)
        separation = np.zeros((r, r))
        for l in range(r):
            for lp in range(l + 1, r):
                val = min(comp_sep[i, j] for i in cmap[l] for j in cmap[lp])
                separation[l, lp] = separation[lp, l] = val
    else:
        clusters = comps
        separation = pairwise_separation(weight, clusters, stencil, graph=graph)

    r = len(clusters)
    if r == 1:
        S_bar = np.inf
        warnings.append("single_cluster")
    else:
        off = separation[~np.eye(r, dtype=bool)]
        S_bar = float(off.min())

    rho_fields = [
        distance_to_set(weight, cl, stencil, graph=graph).h for cl in clusters
    ]

    half = S_bar / 2.0
    candidates = []
    for l, cl in enumerate(clusters):
        ball = np.flatnonzero(rho_fields[l] < half).astype(np.int64)
        if np.isinf(half):
            # everything reachable from the cluster
            ball = np.flatnonzero(np.isfinite(rho_fields[l])).astype(np.int64)
        parts = components(grid, ball)
        inside = np.zeros(grid.node_count, dtype=bool)
        inside[cl] = True
        keep = [part for part in parts if np.any(inside[part])]
        candidates.append(np.sort(np.concatenate(keep)) if keep else cl.copy())

    # disjointness is structural; resolve any floating-point tie by nearest
    # cluster, breaking exact ties toward the smaller cluster index
    best = np.full(grid.node_count, np.inf)
    owner = np.full(grid.node_count, -1, dtype=np.int64)
    for l in range(r):
        cand = candidates[l]
        better = rho_fields[l][cand] < best[cand]
        sel = cand[better]
        best[sel] = rho_fields[l][sel]
        owner[sel] = l
    omegas = [np.flatnonzero(owner == l).astype(np.int64) for l in range(r)]
    for l in range(r):
        if omegas[l].size != candidates[l].size:
            warnings.append(f"omega_tie_resolved:{l}")

    return WellPartition(
        landscape=landscape,
        mu_bar=float(mu_bar),
        delta=float(delta),
        nu=float(nu),
        merge_threshold=float(merge_threshold),
        stencil=stencil,
        weight=weight,
        E=E,
        comps=comps,
        clusters=clusters,
        separation=separation,
        S_bar=S_bar,
        omegas=omegas,
        rho_fields=rho_fields,
        warnings=tuple(warnings),
    )
