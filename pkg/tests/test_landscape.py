"""Landscape solve, positivity floor, and effective potential."""

import numpy as np
import pytest

from eigenwells import (
    assemble,
    build_grid,
    effective_potential,
    make_coefficient_field,
    solve_landscape,
)
from eigenwells.errors import DegeneratePotential

import oracles
from conftest import random_instance


def test_constant_potential_gives_constant_reciprocal():
    for c in [0.5, 1.0, 4.0]:
        grid = build_grid(1, [16], 2, "torus")
        op = assemble(grid, make_coefficient_field(grid, np.full(grid.node_count, c)))
        ls = solve_landscape(op)
        assert np.allclose(ls.u, 1.0 / c, rtol=1e-13, atol=0)
        assert np.allclose(ls.W, c, rtol=1e-13, atol=0)


def test_eight_node_instance_matches_dense_solve():
    grid = build_grid(1, [8], 1, "torus")
    V = np.array([4.0, 0.0, 0.0, 4.0, 4.0, 0.0, 4.0, 0.0])
    op = assemble(grid, make_coefficient_field(grid, V, v_bar=4.0))
    ls = solve_landscape(op)
    K_dense, M_dense = oracles.dense_operator(grid, V, np.ones((8, 1)), np.ones(8))
    u_dense = oracles.dense_landscape(K_dense, M_dense)
    assert np.allclose(ls.u, u_dense, rtol=1e-10)


def test_zero_potential_rejected():
    grid = build_grid(1, [8], 1, "torus")
    op = assemble(grid, make_coefficient_field(grid, np.zeros(8), v_bar=1.0))
    with pytest.raises(DegeneratePotential):
        solve_landscape(op)


def test_floor_and_bounds_on_random_instances():
    for seed in range(50):
        extents = (40,) if seed % 2 == 0 else (7, 6)
        op = random_instance(seed, extents)
        ls = solve_landscape(op)
        v_bar = op.v_bar
        assert ls.u.min() > 0.0
        assert ls.u.min() >= 1.0 / v_bar - 1e-10
        assert ls.W.max() <= v_bar + 1e-8
        assert ls.residual <= 1e-12


def test_matches_dense_solve_on_random_instances():
    for seed in range(10):
        op = random_instance(seed, (6, 4))
        ls = solve_landscape(op)
        K_dense, M_dense = oracles.dense_operator(op.grid, op.coeffs.V, op.coeffs.a, op.coeffs.m)
        u_dense = oracles.dense_landscape(K_dense, M_dense)
        assert np.allclose(ls.u, u_dense, rtol=1e-10)


def test_effective_potential_is_elementwise_reciprocal():
    op = random_instance(3, (30,))
    ls = solve_landscape(op)
    W = effective_potential(ls)
    assert np.array_equal(W, 1.0 / ls.u)
    assert np.array_equal(W, ls.W)
