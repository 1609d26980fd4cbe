"""Shared fixtures and instance factories for the test suite."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from eigenwells import assemble, build_grid, make_coefficient_field


def random_instance(seed, shape, topology="torus", v_bar=4.0, dim=None,
                    cells_per_unit=1, vary_a=True, vary_m=True):
    """Random strictly-positive-V instance with reproducible coefficients."""
    rng = np.random.default_rng(seed)
    if dim is None:
        dim = len(shape)
    grid = build_grid(dim=dim, extent_units=list(shape),
                      cells_per_unit=cells_per_unit, topology=topology)
    n = grid.node_count
    V = rng.uniform(0.1, v_bar, n)
    a = rng.uniform(0.5, 2.0, (n, dim)) if vary_a else np.ones((n, dim))
    m = rng.uniform(0.5, 2.0, n) if vary_m else np.ones(n)
    coeffs = make_coefficient_field(grid, V, a=a, m=m, v_bar=v_bar)
    return assemble(grid, coeffs)


@pytest.fixture(scope="session")
def tmp_out(tmp_path_factory):
    return tmp_path_factory.mktemp("out")
