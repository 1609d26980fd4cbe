"""Landscape function u solving K u = M 1 and the effective potential W = 1/u.

Because K is an M-matrix here, u is strictly positive and satisfies the
floor u >= 1/v_bar, so W = 1/u never exceeds v_bar.  The solve is a sparse
LU factorization by default, falling back to Jacobi-preconditioned conjugate
gradients above ``DIRECT_LIMIT`` unknowns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DegeneratePotential, NoConvergence, NonpositiveLandscape
from .operators import DiscreteOperator

__all__ = ["Landscape", "solve_landscape", "effective_potential", "DIRECT_LIMIT"]

DIRECT_LIMIT = 300_000


@dataclass(frozen=True)
class Landscape:
    """Solution of K u = M 1 with its relative residual and solver metadata."""

    op: DiscreteOperator
    u: np.ndarray
    residual: float
    method: str

    @property
    def W(self) -> np.ndarray:
        """Effective potential 1/u."""
        return 1.0 / self.u


def _relative_residual(op: DiscreteOperator, u: np.ndarray, b: np.ndarray) -> float:
    r = op.K @ u - b
    return float(np.linalg.norm(r) / np.linalg.norm(b))


def solve_landscape(op: DiscreteOperator, tol: float = 1e-12) -> Landscape:
    """Solve K u = M 1 to relative residual ``tol``.

    Raises:
        DegeneratePotential: V vanishes identically (K is singular).
        NoConvergence: residual above tol after the fallback path.
        NonpositiveLandscape: solver returned a nonpositive entry.
    """
    if not op.nondegenerate:
        raise DegeneratePotential("V is identically zero; K u = M 1 has no solution")
    b = op.M.astype(np.float64)
    n = op.dof
    if n <= DIRECT_LIMIT:
        lu = spla.splu(op.K.tocsc())
        u = lu.solve(b)
        method = "sparse_lu"
        res = _relative_residual(op, u, b)
        if res > tol:
            # one step of iterative refinement
            u = u + lu.solve(b - op.K @ u)
            res = _relative_residual(op, u, b)
    else:
        inv_diag = 1.0 / op.K.diagonal()
        precond = spla.LinearOperator((n, n), matvec=lambda x: inv_diag * x)
        u, info = spla.cg(op.K, b, rtol=tol * 0.1, atol=0.0, maxiter=20 * n, M=precond)
        method = "jacobi_cg"
        if info != 0:
            raise NoConvergence(f"conjugate gradients stopped with info={info}")
        res = _relative_residual(op, u, b)
    if res > tol:
        raise NoConvergence(f"landscape residual {res:.3e} exceeds tol {tol:.3e}")
    if np.any(u <= 0.0):
        raise NonpositiveLandscape(f"minimum landscape value {u.min():.3e} is not positive")
    return Landscape(op=op, u=u, residual=res, method=method)


def effective_potential(landscape: Landscape) -> np.ndarray:
    """W = 1/u as a plain array (alias for the ``W`` property)."""
    return landscape.W
