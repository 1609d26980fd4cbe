"""Agmon weight clamping and shortest-path effective distances."""

import numpy as np
import pytest

from eigenwells import (
    agmon_weight,
    assemble,
    build_cost_graph,
    build_grid,
    distance_to_set,
    make_coefficient_field,
    pairwise_separation,
    solve_landscape,
    sublevel_set,
)
from eigenwells.agmon import AgmonWeight
from eigenwells.errors import EmptySourceSet, NegativeLevel
from eigenwells.landscape import Landscape

import oracles
from conftest import random_instance


def constant_landscape(c=2.0, extents=(8,), cpu=2, topology="torus", exact=False):
    dim = len(extents)
    grid = build_grid(dim, list(extents), cpu, topology)
    op = assemble(grid, make_coefficient_field(grid, np.full(grid.node_count, c)))
    if exact:
        # Constant potential has the closed-form landscape u = 1/c; bypass the
        # solver so downstream clamps see the value without rounding noise.
        return Landscape(op=op, u=np.full(grid.node_count, 1.0 / c),
                         residual=0.0, method="closed_form")
    return solve_landscape(op)


def direct_weight(grid, w, inv_a=None):
    """AgmonWeight with prescribed values (bypasses the landscape solve)."""
    if inv_a is None:
        inv_a = np.ones((grid.node_count, grid.dim))
    return AgmonWeight(grid=grid, mu=0.0, w=np.asarray(w, float), inv_a=inv_a)


def graph_edges(graph):
    """Unique undirected (i, j, cost) triples of a symmetric cost matrix."""
    coo = graph.tocoo()
    return [(i, j, c) for i, j, c in zip(coo.row, coo.col, coo.data) if i < j]


def test_weight_clamps_at_level():
    ls = constant_landscape(c=2.0, exact=True)
    assert np.array_equal(agmon_weight(ls, 2.0).w, np.zeros(ls.u.size))
    assert np.array_equal(agmon_weight(ls, 0.0).w, np.full(ls.u.size, 2.0))
    assert np.array_equal(agmon_weight(ls, 0.5).w, np.full(ls.u.size, 1.5))
    # A numerically solved landscape clamps to zero up to the solve residual.
    solved = agmon_weight(constant_landscape(c=2.0), 2.0)
    assert np.all(solved.w <= 1e-12)


def test_weight_zero_set_equals_sublevel_set():
    for seed in range(6):
        op = random_instance(seed, (30,))
        ls = solve_landscape(op)
        mu = float(np.quantile(ls.W, 0.4))
        weight = agmon_weight(ls, mu)
        scan = np.flatnonzero(ls.W - mu <= 0.0)
        assert np.array_equal(weight.zero_set(), scan)
        assert np.array_equal(np.sort(sublevel_set(ls, mu)), scan)


def test_negative_level_rejected():
    ls = constant_landscape()
    with pytest.raises(NegativeLevel):
        agmon_weight(ls, -0.1)


def test_zero_weight_gives_zero_distance():
    ls = constant_landscape(c=3.0, extents=(4, 4), cpu=1)
    weight = agmon_weight(ls, 3.0 + 1e-9)
    field = distance_to_set(weight, [0])
    assert np.array_equal(field.h, np.zeros(ls.u.size))


def test_constant_weight_scales_grid_geodesic():
    c = 2.25
    grid = build_grid(1, [16], 2, "torus")
    weight = direct_weight(grid, np.full(grid.node_count, c))
    field = distance_to_set(weight, [0])
    n = grid.node_count
    steps = np.minimum(np.arange(n), n - np.arange(n))
    assert np.allclose(field.h, np.sqrt(c) * grid.h * steps, rtol=1e-13)


def test_sources_have_zero_distance():
    op = random_instance(4, (6, 5))
    ls = solve_landscape(op)
    weight = agmon_weight(ls, float(np.median(ls.W)))
    sources = [0, 7, 19]
    field = distance_to_set(weight, sources)
    assert np.array_equal(field.h[sources], np.zeros(3))


def test_matches_floyd_warshall_exactly_dyadic():
    # sqrt(w) in sixteenths and h = 1 make every path sum exact in binary
    # floating point, so label-setting and all-pairs relaxation agree bitwise.
    rng = np.random.default_rng(17)
    shapes = [(1, [25], "torus"), (1, [12], "box"), (2, [5, 5], "torus"),
              (2, [4, 4], "box"), (2, [3, 7], "torus")]
    for dim, extents, topology in shapes:
        grid = build_grid(dim, extents, 1, topology)
        sw = rng.integers(0, 16, grid.node_count) / 16.0
        weight = direct_weight(grid, sw * sw)
        graph = build_cost_graph(weight)
        D = oracles.floyd_warshall(grid.node_count, graph_edges(graph))
        for src in rng.choice(grid.node_count, size=3, replace=False):
            field = distance_to_set(weight, [int(src)], graph=graph)
            assert np.array_equal(field.h, D[src])


def test_matches_floyd_warshall_generic_weights():
    op = random_instance(9, (5, 5))
    ls = solve_landscape(op)
    weight = agmon_weight(ls, float(np.quantile(ls.W, 0.3)))
    graph = build_cost_graph(weight)
    D = oracles.floyd_warshall(op.dof, graph_edges(graph))
    for src in [0, 11, 24]:
        field = distance_to_set(weight, [src], graph=graph)
        assert np.allclose(field.h, D[src], rtol=1e-12, atol=1e-15)


def test_edge_lipschitz_bound():
    for seed in range(4):
        op = random_instance(seed, (7, 4))
        ls = solve_landscape(op)
        weight = agmon_weight(ls, float(np.quantile(ls.W, 0.25)))
        graph = build_cost_graph(weight)
        field = distance_to_set(weight, [0])
        for i, j, c in graph_edges(graph):
            assert abs(field.h[i] - field.h[j]) <= c * (1.0 + 1e-12) + 1e-15


def test_distance_monotone_in_level():
    op = random_instance(6, (40,))
    ls = solve_landscape(op)
    mu1, mu2 = np.quantile(ls.W, [0.2, 0.6])
    f1 = distance_to_set(agmon_weight(ls, float(mu1)), [0])
    f2 = distance_to_set(agmon_weight(ls, float(mu2)), [0])
    assert np.all(f1.h >= f2.h - 1e-12)


def test_triangle_inequality_sampled():
    op = random_instance(8, (5, 4))
    ls = solve_landscape(op)
    weight = agmon_weight(ls, float(np.quantile(ls.W, 0.3)))
    graph = build_cost_graph(weight)
    n = op.dof
    fields = {s: distance_to_set(weight, [s], graph=graph).h for s in range(n)}
    rng = np.random.default_rng(0)
    for _ in range(200):
        x, y, z = rng.integers(0, n, 3)
        assert fields[int(x)][z] <= fields[int(x)][y] + fields[int(y)][z] + 1e-12


def test_nearest_source_labels():
    op = random_instance(10, (6, 6))
    ls = solve_landscape(op)
    weight = agmon_weight(ls, float(np.quantile(ls.W, 0.2)))
    sources = [0, 17, 30]
    graph = build_cost_graph(weight)
    field = distance_to_set(weight, sources, want_nearest=True)
    per_source = {s: distance_to_set(weight, [s], graph=graph).h for s in sources}
    best = np.min(np.stack([per_source[s] for s in sources]), axis=0)
    assert np.allclose(field.h, best, rtol=1e-12, atol=1e-15)
    for i in range(op.dof):
        owner = int(field.nearest_source[i])
        assert owner in sources
        assert per_source[owner][i] <= best[i] * (1 + 1e-12) + 1e-15
    assert np.array_equal(field.nearest_source[sources], sources)


def test_diagonal_stencil_shortcuts_2d():
    c = 1.5625
    grid = build_grid(2, [5, 5], 1, "torus")
    weight = direct_weight(grid, np.full(grid.node_count, c))
    axis_field = distance_to_set(weight, [0], stencil="axis")
    diag_field = distance_to_set(weight, [0], stencil="diagonal")
    assert np.all(diag_field.h <= axis_field.h + 1e-15)
    # the diagonal neighbor (1,1) is one sqrt(2)-length edge away
    j = grid.flat_index([np.asarray(1), np.asarray(1)])
    assert diag_field.h[int(j)] == pytest.approx(np.sqrt(2.0 * c) * grid.h, rel=1e-13)
    assert axis_field.h[int(j)] == pytest.approx(2.0 * np.sqrt(c) * grid.h, rel=1e-13)


def test_pairwise_separation_single_component():
    ls = constant_landscape()
    weight = agmon_weight(ls, 0.0)
    sep = pairwise_separation(weight, [np.arange(ls.u.size)])
    assert sep.shape == (1, 1) and sep[0, 0] == 0.0


def test_pairwise_separation_two_singletons():
    c = 2.89
    grid = build_grid(1, [9], 1, "box")
    weight = direct_weight(grid, np.full(grid.node_count, c))
    d = grid.h * 9  # geodesic length between the endpoints
    sep = pairwise_separation(weight, [np.array([0]), np.array([9])])
    assert sep[0, 1] == pytest.approx(np.sqrt(c) * d, rel=1e-13)
    assert sep[1, 0] == sep[0, 1] and sep[0, 0] == sep[1, 1] == 0.0


def test_pairwise_separation_matches_per_pair_runs():
    op = random_instance(12, (60,))
    ls = solve_landscape(op)
    mu = float(np.quantile(ls.W, 0.15))
    weight = agmon_weight(ls, mu)
    idx = sublevel_set(ls, mu)
    comps = oracles.bfs_components(op.grid.shape, op.grid.topology, idx)
    if len(comps) < 2:
        pytest.skip("realization produced a single well")
    comps = [np.array(c) for c in comps]
    sep = pairwise_separation(weight, comps)
    assert np.allclose(sep, sep.T, rtol=0, atol=1e-12)
    graph = build_cost_graph(weight)
    for a in range(len(comps)):
        fa = distance_to_set(weight, comps[a], graph=graph)
        for b in range(len(comps)):
            brute = 0.0 if a == b else float(fa.h[comps[b]].min())
            assert sep[a, b] == pytest.approx(brute, rel=1e-12, abs=1e-15)


def test_empty_source_set_rejected():
    ls = constant_landscape()
    weight = agmon_weight(ls, 0.0)
    with pytest.raises(EmptySourceSet):
        distance_to_set(weight, [])
