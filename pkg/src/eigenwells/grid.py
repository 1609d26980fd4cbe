"""Uniform Cartesian grids on flat tori and axis-aligned boxes (dim 1 or 2).

Nodes are ordered row-major with axis 0 fastest: a node with integer
coordinates ``(i_0, i_1)`` on a grid with ``shape = (n_0, n_1)`` has flat
index ``i_0 + n_0 * i_1``.  The mesh width is ``h = 1 / cells_per_unit`` in
the physical length unit, uniform across axes.  A torus axis of extent
``T_k`` units carries ``T_k * cells_per_unit`` nodes; a box axis carries one
more (both endpoints present).  Boxes impose no boundary condition here;
missing neighbors simply contribute nothing downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import EmptyIndexSet, IndexOutOfRange, InvalidDimension, ZeroExtent

__all__ = ["TORUS", "BOX", "GridSpec", "build_grid", "as_index_set"]

TORUS = "torus"
BOX = "box"


@dataclass(frozen=True)
class GridSpec:
    """Immutable description of a uniform grid.

    Attributes:
        dim: spatial dimension, 1 or 2.
        extent_units: per-axis extent in length units (positive ints).
        cells_per_unit: grid cells per length unit (h = 1 / cells_per_unit).
        topology: "torus" (periodic) or "box" (no wrap).
        shape: nodes per axis.
        node_count: total number of nodes.
        h: mesh width.
    """

    dim: int
    extent_units: tuple[int, ...]
    cells_per_unit: int
    topology: str
    shape: tuple[int, ...]
    node_count: int
    h: float

    @cached_property
    def _index_grid(self) -> np.ndarray:
        # arr[i_{dim-1}, ..., i_0] = flat index, so numpy axis (dim-1-k)
        # corresponds to grid axis k and axis 0 is fastest in memory.
        return np.arange(self.node_count, dtype=np.int64).reshape(self.shape[::-1])

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All undirected nearest-neighbor edges, each listed once.

        Returns (ei, ej, axis): endpoint indices and the axis each edge runs
        along.  On the torus the wrap edge along each axis is included
        (suppressed when an axis has fewer than 3 nodes, where the wrap
        neighbor would duplicate the interior edge or be the node itself).
        """
        arr = self._index_grid
        ei_parts, ej_parts, ax_parts = [], [], []
        for k in range(self.dim):
            nk = self.shape[k]
            np_axis = self.dim - 1 - k
            if self.topology == TORUS:
                a = arr
                b = np.roll(arr, -1, axis=np_axis)
            else:
                sl_lo = [slice(None)] * self.dim
                sl_hi = [slice(None)] * self.dim
                sl_lo[np_axis] = slice(0, nk - 1)
                sl_hi[np_axis] = slice(1, nk)
                a = arr[tuple(sl_lo)]
                b = arr[tuple(sl_hi)]
            ei_parts.append(a.ravel())
            ej_parts.append(b.ravel())
            ax_parts.append(np.full(a.size, k, dtype=np.int64))
        ei = np.concatenate(ei_parts)
        ej = np.concatenate(ej_parts)
        ax = np.concatenate(ax_parts)
        return ei, ej, ax

    def multi_index(self, i: int | np.ndarray) -> tuple[np.ndarray, ...]:
        """Integer per-axis coordinates of flat index ``i`` (axis 0 fastest)."""
        i = np.asarray(i)
        out = []
        rem = i
        for nk in self.shape:
            out.append(rem % nk)
            rem = rem // nk
        return tuple(out)

    def flat_index(self, coords) -> np.ndarray:
        """Flat index of per-axis integer coordinates (inverse of multi_index)."""
        idx = np.zeros_like(np.asarray(coords[0]), dtype=np.int64)
        stride = 1
        for k, nk in enumerate(self.shape):
            ck = np.asarray(coords[k])
            if np.any(ck < 0) or np.any(ck >= nk):
                raise IndexOutOfRange(f"coordinate along axis {k} outside [0, {nk})")
            idx = idx + stride * ck
            stride *= nk
        return idx

    def positions(self) -> np.ndarray:
        """Physical coordinates of all nodes, shape (node_count, dim)."""
        coords = self.multi_index(np.arange(self.node_count))
        return np.stack([c * self.h for c in coords], axis=1)

    def neighbors(self, i: int) -> list[tuple[int, int]]:
        """Nearest neighbors of node ``i`` as (index, axis) pairs.

        Torus axes wrap; box axes drop out-of-range neighbors.  Neighbors are
        listed in (axis, -then +) order, deduplicated on tiny axes.
        """
        if not 0 <= i < self.node_count:
            raise IndexOutOfRange(f"node {i} outside [0, {self.node_count})")
        coords = [int(c) for c in self.multi_index(i)]
        out: list[tuple[int, int]] = []
        seen = {i}
        for k, nk in enumerate(self.shape):
            for step in (-1, 1):
                ck = coords[k] + step
                if self.topology == TORUS:
                    ck %= nk
                elif not 0 <= ck < nk:
                    continue
                nb = coords.copy()
                nb[k] = ck
                j = int(self.flat_index([np.asarray(c) for c in nb]))
                if j not in seen:
                    out.append((j, k))
                    seen.add(j)
        return out

    def edge_count(self) -> int:
        return int(self.edge_arrays[0].size)


def build_grid(dim: int, extent_units, cells_per_unit: int, topology: str = TORUS) -> GridSpec:
    """Validate parameters and construct a :class:`GridSpec`.

    Raises:
        InvalidDimension: dim not in {1, 2} or unknown topology.
        ZeroExtent: nonpositive extent or cells_per_unit.
    """
    if dim not in (1, 2):
        raise InvalidDimension(f"dim must be 1 or 2, got {dim}")
    if topology not in (TORUS, BOX):
        raise InvalidDimension(f"topology must be '{TORUS}' or '{BOX}', got {topology!r}")
    extents = tuple(int(t) for t in np.atleast_1d(extent_units))
    if len(extents) != dim:
        raise InvalidDimension(f"need {dim} extents, got {len(extents)}")
    if any(t <= 0 for t in extents):
        raise ZeroExtent(f"extents must be positive, got {extents}")
    p = int(cells_per_unit)
    if p <= 0:
        raise ZeroExtent(f"cells_per_unit must be positive, got {cells_per_unit}")
    shape = tuple(t * p + (1 if topology == BOX else 0) for t in extents)
    if topology == TORUS and min(shape) < 3:
        # a 2-node ring is a multigraph (two edges between the same pair)
        # and a 1-node ring is a self-loop; neither is supported
        raise ZeroExtent(f"torus axes need at least 3 nodes, got shape {shape}")
    node_count = int(np.prod(shape))
    return GridSpec(
        dim=dim,
        extent_units=extents,
        cells_per_unit=p,
        topology=topology,
        shape=shape,
        node_count=node_count,
        h=1.0 / p,
    )


def as_index_set(indices, node_count: int, allow_empty: bool = False) -> np.ndarray:
    """Normalize ``indices`` to a sorted unique int64 array within range."""
    arr = np.unique(np.asarray(indices, dtype=np.int64))
    if arr.size == 0:
        if allow_empty:
            return arr
        raise EmptyIndexSet("index set is empty")
    if arr[0] < 0 or arr[-1] >= node_count:
        raise IndexOutOfRange(
            f"indices must lie in [0, {node_count}), got range [{arr[0]}, {arr[-1]}]"
        )
    return arr
