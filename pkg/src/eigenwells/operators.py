"""Assembly of the discrete divergence-form operator and its quadratic form.

The operator discretizes -(1/m) div(m A grad f) + V f on a :class:`GridSpec`
as a generalized matrix pencil (K, M):

* every nearest-neighbor edge (i, j) along axis k carries the coefficient
  ``c_ij = h**(dim-2) * (m_i * a_i[k] + m_j * a_j[k]) / 2``,
* ``M_ii = m_i * h**dim`` (diagonal mass matrix),
* ``K_ij = -c_ij`` off the diagonal and ``K_ii = sum_j c_ij + V_i * M_ii``.

K is exactly symmetric with nonpositive off-diagonal entries, positive
semidefinite, and positive definite whenever V is nonzero somewhere on a
connected grid.  Restriction to an index set takes the principal submatrix,
which realizes a Dirichlet condition on the dropped nodes: coefficients of
edges leaving the set stay on the diagonal.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .errors import (
    EmptyIndexSet,
    LengthMismatch,
    NegativePotential,
    NonpositiveCoefficient,
)
from .grid import GridSpec, as_index_set

__all__ = [
    "CoefficientField",
    "DiscreteOperator",
    "make_coefficient_field",
    "assemble",
    "quadratic_form",
    "restrict",
    "load_coefficients_csv",
    "save_coefficients_csv",
]


@dataclass(frozen=True)
class CoefficientField:
    """Per-node coefficients: potential V >= 0, diffusion a > 0, mass m > 0.

    ``v_bar`` is the recorded supremum bound for V (>= max(V)); bounds in the
    verification module are stated in terms of it.  ``coefficient_bound`` is
    the smallest C with a, m and their reciprocals all <= C.
    """

    V: np.ndarray
    a: np.ndarray  # shape (n, dim)
    m: np.ndarray
    v_bar: float
    coefficient_bound: float

    @property
    def nondegenerate(self) -> bool:
        return bool(np.any(self.V > 0.0))


def make_coefficient_field(grid: GridSpec, V, a=1.0, m=1.0, v_bar=None) -> CoefficientField:
    """Broadcast, validate, and freeze a coefficient field for ``grid``.

    Scalars for ``a`` and ``m`` broadcast to all nodes (and both axes).

    Raises:
        LengthMismatch: array sizes differ from grid.node_count.
        NegativePotential: some V_i < 0.
        NonpositiveCoefficient: some a or m entry <= 0, or v_bar < max(V).
    """
    n = grid.node_count
    V = np.asarray(V, dtype=np.float64).ravel()
    if V.size != n:
        raise LengthMismatch(f"V has {V.size} entries, grid has {n} nodes")
    if np.any(V < 0.0):
        raise NegativePotential("V must be nonnegative")

    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 0:
        a = np.full((n, grid.dim), float(a))
    elif a.ndim == 1:
        if a.size != n:
            raise LengthMismatch(f"a has {a.size} entries, grid has {n} nodes")
        a = np.repeat(a[:, None], grid.dim, axis=1)
    else:
        if a.shape != (n, grid.dim):
            raise LengthMismatch(f"a has shape {a.shape}, expected ({n}, {grid.dim})")
        a = a.astype(np.float64)
    if np.any(a <= 0.0):
        raise NonpositiveCoefficient("a must be strictly positive")

    m = np.asarray(m, dtype=np.float64)
    if m.ndim == 0:
        m = np.full(n, float(m))
    elif m.size != n:
        raise LengthMismatch(f"m has {m.size} entries, grid has {n} nodes")
    m = m.ravel().astype(np.float64)
    if np.any(m <= 0.0):
        raise NonpositiveCoefficient("m must be strictly positive")

    vmax = float(V.max()) if n else 0.0
    if v_bar is None:
        v_bar = vmax
    v_bar = float(v_bar)
    if v_bar < vmax:
        raise NonpositiveCoefficient(f"v_bar={v_bar} is below max(V)={vmax}")
    bound = float(max(a.max(), (1.0 / a).max(), m.max(), (1.0 / m).max()))
    return CoefficientField(V=V, a=a, m=m, v_bar=v_bar, coefficient_bound=bound)


@dataclass(frozen=True)
class DiscreteOperator:
    """Assembled pencil (K, M) together with its edge decomposition.

    ``edges`` holds (ei, ej, axis, c) for every undirected edge of the
    (possibly restricted) domain.  ``boundary_c[i]`` accumulates coefficients
    of edges from i to nodes dropped by restriction (zero on the full grid),
    so the quadratic form of the restricted operator equals the full-grid
    form of the zero-extended vector.  ``original_indices`` maps local rows
    back to full-grid nodes (None means the operator covers the full grid).
    """

    grid: GridSpec
    V: np.ndarray
    m: np.ndarray
    v_bar: float
    M: np.ndarray  # diagonal of the mass matrix
    K: sp.csr_matrix
    edges: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
    boundary_c: np.ndarray
    original_indices: np.ndarray | None = None
    coeffs: CoefficientField | None = None

    @property
    def dof(self) -> int:
        return int(self.M.size)

    @property
    def nondegenerate(self) -> bool:
        return bool(np.any(self.V > 0.0))

    def mass_inner(self, f: np.ndarray, g: np.ndarray) -> float:
        """M-weighted inner product sum_i f_i g_i M_ii."""
        return float(np.dot(f * self.M, g))

    def mass_norm_sq(self, f: np.ndarray) -> float:
        return float(np.dot(f * f, self.M))

    def laplacian_part(self) -> sp.csr_matrix:
        """K with the potential term removed (still includes boundary_c)."""
        return (self.K - sp.diags(self.V * self.M)).tocsr()


def assemble(grid: GridSpec, coeffs: CoefficientField) -> DiscreteOperator:
    """Assemble the (K, M) pencil for ``coeffs`` on ``grid``."""
    if coeffs.V.size != grid.node_count:
        raise LengthMismatch("coefficient field does not match grid")
    n = grid.node_count
    h = grid.h
    ei, ej, eax = grid.edge_arrays
    ma = coeffs.m[:, None] * coeffs.a  # (n, dim)
    c = h ** (grid.dim - 2) * 0.5 * (ma[ei, eax] + ma[ej, eax])
    M = coeffs.m * h**grid.dim

    diag = coeffs.V * M
    np.add.at(diag, ei, c)
    np.add.at(diag, ej, c)
    rows = np.concatenate([ei, ej, np.arange(n)])
    cols = np.concatenate([ej, ei, np.arange(n)])
    data = np.concatenate([-c, -c, diag])
    K = sp.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
    return DiscreteOperator(
        grid=grid,
        V=coeffs.V.copy(),
        m=coeffs.m.copy(),
        v_bar=coeffs.v_bar,
        M=M,
        K=K,
        edges=(ei.copy(), ej.copy(), eax.copy(), c),
        boundary_c=np.zeros(n),
        coeffs=coeffs,
    )


def quadratic_form(op: DiscreteOperator, f: np.ndarray) -> float:
    """Energy f^T K f via the edge decomposition (nonnegative by construction).

    Equals sum_edges c_ij (f_i - f_j)^2 + sum_i boundary_c_i f_i^2
    + sum_i V_i M_ii f_i^2.
    """
    f = np.asarray(f, dtype=np.float64).ravel()
    if f.size != op.dof:
        raise LengthMismatch(f"vector has {f.size} entries, operator has {op.dof}")
    ei, ej, _, c = op.edges
    d = f[ei] - f[ej]
    total = float(np.dot(c, d * d))
    total += float(np.dot(op.boundary_c, f * f))
    total += float(np.dot(op.V * op.M, f * f))
    return total


def restrict(op: DiscreteOperator, indices) -> DiscreteOperator:
    """Principal-submatrix (Dirichlet) restriction of ``op`` to ``indices``.

    Indices refer to the rows of ``op`` (full-grid nodes when ``op`` is
    unrestricted).  Eigenvalues of the restricted pencil dominate those of
    ``op`` (Cauchy interlacing for the Dirichlet restriction).
    """
    idx = as_index_set(indices, op.dof)
    if idx.size == 0:
        raise EmptyIndexSet("cannot restrict to an empty index set")
    n_sub = idx.size
    lookup = np.full(op.dof, -1, dtype=np.int64)
    lookup[idx] = np.arange(n_sub)

    ei, ej, eax, c = op.edges
    li, lj = lookup[ei], lookup[ej]
    inside = (li >= 0) & (lj >= 0)
    half_i = (li >= 0) & (lj < 0)
    half_j = (lj >= 0) & (li < 0)

    boundary_c = op.boundary_c[idx].copy()
    np.add.at(boundary_c, li[half_i], c[half_i])
    np.add.at(boundary_c, lj[half_j], c[half_j])

    K_sub = op.K[idx, :][:, idx].tocsr()
    orig = idx if op.original_indices is None else op.original_indices[idx]
    return replace(
        op,
        V=op.V[idx],
        m=op.m[idx],
        M=op.M[idx],
        K=K_sub,
        edges=(li[inside], lj[inside], eax[inside], c[inside]),
        boundary_c=boundary_c,
        original_indices=orig,
        coeffs=None,
    )


_CSV_FIELDS_1D = ["node_index", "V", "a_0", "m"]
_CSV_FIELDS_2D = ["node_index", "V", "a_0", "a_1", "m"]


def save_coefficients_csv(path, grid: GridSpec, coeffs: CoefficientField) -> None:
    """Write per-node coefficients as CSV (17 significant digits)."""
    fields = _CSV_FIELDS_1D if grid.dim == 1 else _CSV_FIELDS_2D
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for i in range(grid.node_count):
            row = [i, format(coeffs.V[i], ".17g")]
            row += [format(coeffs.a[i, k], ".17g") for k in range(grid.dim)]
            row.append(format(coeffs.m[i], ".17g"))
            writer.writerow(row)


def load_coefficients_csv(path, grid: GridSpec, v_bar=None) -> CoefficientField:
    """Read a coefficient CSV written by :func:`save_coefficients_csv`.

    Every node index must appear exactly once; row order is free.
    """
    fields = _CSV_FIELDS_1D if grid.dim == 1 else _CSV_FIELDS_2D
    n = grid.node_count
    V = np.full(n, np.nan)
    a = np.full((n, grid.dim), np.nan)
    m = np.full(n, np.nan)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [col.strip() for col in header] != fields:
            raise LengthMismatch(f"expected columns {fields}, got {header}")
        for row in reader:
            if not row:
                continue
            i = int(row[0])
            if not 0 <= i < n:
                raise LengthMismatch(f"node index {i} outside [0, {n})")
            if not np.isnan(V[i]):
                raise LengthMismatch(f"node index {i} appears twice")
            V[i] = float(row[1])
            for k in range(grid.dim):
                a[i, k] = float(row[2 + k])
            m[i] = float(row[2 + grid.dim])
    if np.any(np.isnan(V)):
        missing = int(np.flatnonzero(np.isnan(V))[0])
        raise LengthMismatch(f"node index {missing} missing from {path}")
    return make_coefficient_field(grid, V, a, m, v_bar=v_bar)
