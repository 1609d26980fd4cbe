"""Deterministic writers: float formatting, CSV/JSON layout, figure bytes."""

import json
import math
import types

import numpy as np
import pytest

from eigenwells import (
    assemble,
    build_grid,
    build_partition,
    eig_smallest,
    make_coefficient_field,
    solve_landscape,
    verify_landscape_floor,
)
from eigenwells.rng import SplitMix64
from eigenwells.report import (
    fig_distance_1d,
    fig_eigenvectors_1d,
    fig_ensemble_fit,
    fig_heatmap_2d,
    fig_landscape_1d,
    fig_margins,
    fig_wells_1d,
    fmt_float,
    write_csv,
    write_json,
)

from test_wells import two_well_landscape

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


# --------------------------------------------------------------------------
# float formatting


def test_fmt_float_round_trips_exactly():
    cases = [
        0.0, -0.0, 1.0, -1.0, 0.1, 1.0 / 3.0, math.pi, math.e,
        1e-300, 1e300, 5e-324, 1.7976931348623157e308,
        2.0 ** -52, 1.0 + 2.0 ** -52, 0.45508, 1.5661e5,
    ]
    for x in cases:
        assert float(fmt_float(x)) == x, x


def test_fmt_float_round_trips_random_doubles():
    rng = SplitMix64(2024)
    for _ in range(5000):
        u = rng.next_float()
        for x in (u, u * 1e17, u * 1e-17, -u, (u - 0.5) * 1e8):
            assert float(fmt_float(x)) == x


def test_fmt_float_special_values():
    assert fmt_float(float("nan")) == "nan"
    assert fmt_float(float("inf")) == "inf"
    assert fmt_float(float("-inf")) == "-inf"
    assert fmt_float(np.float64(0.25)) == "0.25"
    assert fmt_float(np.inf) == "inf"


# --------------------------------------------------------------------------
# CSV


def test_write_csv_exact_layout(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, ["a", "b"], [
        [1, 2.5],
        [True, "x,y"],
        ['q"uote', float("nan")],
        [np.int64(7), np.float64(0.1)],
    ])
    expected = (
        "a,b\n"
        "1,2.5\n"
        'true,"x,y"\n'
        '"q""uote",nan\n'
        "7,0.10000000000000001\n"
    )
    assert path.read_text() == expected


def test_write_csv_is_deterministic(tmp_path):
    rng = SplitMix64(9)
    rows = [[i, rng.next_float(), rng.next_float() > 0.5] for i in range(50)]
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(p1, ["i", "x", "flag"], rows)
    write_csv(p2, ["i", "x", "flag"], rows)
    assert p1.read_bytes() == p2.read_bytes()


def test_write_csv_floats_parse_back_exactly(tmp_path):
    rng = SplitMix64(10)
    values = [(rng.next_float() - 0.5) * 10.0 ** (i % 17) for i in range(100)]
    path = tmp_path / "f.csv"
    write_csv(path, ["x"], [[v] for v in values])
    lines = path.read_text().splitlines()
    assert lines[0] == "x"
    parsed = [float(s) for s in lines[1:]]
    assert parsed == values


def test_write_csv_quotes_newlines(tmp_path):
    path = tmp_path / "n.csv"
    write_csv(path, ["note"], [["two\nlines"]])
    assert path.read_text() == 'note\n"two\nlines"\n'


# --------------------------------------------------------------------------
# JSON


def test_write_json_parses_back_with_stdlib(tmp_path):
    payload = {
        "ints": [1, 2, np.int32(3)],
        "floats": np.array([0.5, 1.0 / 3.0]),
        "flag": True,
        "none": None,
        "nested": {"deep": {"x": 0.1}},
        "empty_list": [],
        "empty_obj": {},
        "tuple": (1.5, 2.5),
        "text": 'quote " backslash \\ newline \n tab \t done',
        17: "int key",
    }
    path = tmp_path / "t.json"
    write_json(path, payload)
    got = json.loads(path.read_text())
    assert got["ints"] == [1, 2, 3]
    assert got["floats"] == [0.5, 1.0 / 3.0]
    assert got["flag"] is True
    assert got["none"] is None
    assert got["nested"]["deep"]["x"] == 0.1
    assert got["empty_list"] == []
    assert got["empty_obj"] == {}
    assert got["tuple"] == [1.5, 2.5]
    assert got["text"] == payload["text"]
    assert got["17"] == "int key"


def test_write_json_nonfinite_floats_become_strings(tmp_path):
    path = tmp_path / "nf.json"
    write_json(path, {"a": float("nan"), "b": float("inf"), "c": float("-inf")})
    got = json.loads(path.read_text())  # stdlib strict mode: no bare NaN tokens
    assert got == {"a": "nan", "b": "inf", "c": "-inf"}


def test_write_json_float_digits(tmp_path):
    path = tmp_path / "d.json"
    write_json(path, {"x": 0.1})
    assert '"x": 0.10000000000000001' in path.read_text()


def test_write_json_rejects_unknown_types(tmp_path):
    with pytest.raises(TypeError):
        write_json(tmp_path / "bad.json", {"s": {1, 2}})


def test_write_json_is_deterministic(tmp_path):
    rng = SplitMix64(11)
    payload = {"xs": [rng.next_float() for _ in range(40)], "k": 3}
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_json(p1, payload)
    write_json(p2, payload)
    assert p1.read_bytes() == p2.read_bytes()


# --------------------------------------------------------------------------
# figures


def _double_save(fn, tmp_path, name):
    p1, p2 = tmp_path / f"{name}_1.png", tmp_path / f"{name}_2.png"
    fn(p1)
    fn(p2)
    b1, b2 = p1.read_bytes(), p2.read_bytes()
    assert b1[:8] == PNG_MAGIC
    assert b1 == b2, f"{name} figure bytes differ between identical saves"


def test_figures_render_and_are_deterministic(tmp_path):
    ls = two_well_landscape()
    grid, op = ls.op.grid, ls.op
    part = build_partition(ls, mu_bar=float(np.quantile(ls.W, 0.2)), delta=0.05)
    es = eig_smallest(op, 3)
    reports = [verify_landscape_floor(ls).renamed(f"floor_{i}") for i in range(3)]
    V = op.coefficients.V if hasattr(op, "coefficients") else np.full(op.dof, 1.0)

    _double_save(lambda p: fig_landscape_1d(p, grid, V, ls, dpi=60), tmp_path, "ls")
    _double_save(lambda p: fig_wells_1d(p, grid, ls, part, dpi=60), tmp_path, "wells")
    _double_save(
        lambda p: fig_eigenvectors_1d(p, grid, es.values, es.vectors, dpi=60),
        tmp_path, "eigs",
    )
    _double_save(
        lambda p: fig_distance_1d(p, grid, np.abs(np.sin(np.arange(op.dof))), dpi=60),
        tmp_path, "dist",
    )
    _double_save(lambda p: fig_margins(p, reports, dpi=60), tmp_path, "margins")

    summary = types.SimpleNamespace(
        per_T={8: {"median_S_min": 5.6}, 16: {"median_S_min": 8.0},
               32: {"median_S_min": 11.3}},
        fit_prefactor=2.0, fit_exponent=0.5,
    )
    _double_save(lambda p: fig_ensemble_fit(p, summary, dpi=60), tmp_path, "fit")


def test_heatmap_2d_renders(tmp_path):
    grid = build_grid(2, [5, 4], 1, "torus")
    field = np.arange(grid.node_count, dtype=float)
    overlay = field > field.mean()
    _double_save(
        lambda p: fig_heatmap_2d(p, grid, field, "field", overlay=overlay, dpi=60),
        tmp_path, "heat",
    )


def test_margins_figure_handles_skipped_and_failed(tmp_path):
    ls = two_well_landscape()
    ok = verify_landscape_floor(ls)
    from eigenwells.verify import CheckReport
    bad = CheckReport(name="bad", lhs=3.0, rhs=1.0, slack=2.0, passed=False)
    skip = CheckReport(name="skip", lhs=float("nan"), rhs=float("nan"),
                       slack=1.0, passed=True, skipped=True, notes="n/a")
    fig_margins(tmp_path / "m.png", [ok, bad, skip], dpi=60)
    assert (tmp_path / "m.png").read_bytes()[:8] == PNG_MAGIC
