"""Strict configuration parsing: defaults, rejection rules, level resolution."""

import json

import pytest

from eigenwells.config import (
    RunConfig,
    load_config,
    parse_config,
    resolve_delta,
    resolve_mu_bar,
)
from eigenwells.errors import ConfigError


def test_empty_config_resolves_all_defaults():
    cfg = parse_config({})
    assert cfg.get("grid", "dim") == 1
    assert cfg.get("grid", "extents") is None
    assert cfg.get("grid", "cells_per_unit") == 4
    assert cfg.get("grid", "topology") == "torus"
    assert cfg.get("coefficients", "source") == "generator"
    assert cfg.get("coefficients", "generator") == "uniform1d"
    assert cfg.get("coefficients", "seed") == 0
    assert cfg.get("coefficients", "v_bar") == 4.0
    assert cfg.get("coefficients", "prob") == 0.3
    assert cfg.get("solver", "eigen_tol") == 1e-10
    assert cfg.get("solver", "landscape_tol") == 1e-12
    assert cfg.get("solver", "eigen_method") == "auto"
    assert cfg.get("solver", "refine_tails") is True
    assert cfg.get("analysis", "mu_bar") == "lambda1"
    assert cfg.get("analysis", "delta") == "1/T"
    assert cfg.get("analysis", "alpha") == 0.5
    assert cfg.get("analysis", "merge_threshold") == 0.0
    assert cfg.get("analysis", "k_eigs") == 6
    assert cfg.get("analysis", "k_per_well") == 4
    assert cfg.get("analysis", "stencil") == "axis"
    assert cfg.get("analysis", "slack") == 2.0
    assert cfg.get("ensemble", "realizations") == 200
    assert cfg.get("ensemble", "threads") == 1
    assert cfg.get("demo2d", "T") == 80
    assert cfg.get("demo2d", "k_eigs") == 20
    assert cfg.get("demo2d", "target_eig") == 5
    assert cfg.get("output", "dir") == "out"
    assert cfg.get("output", "figures") is True
    assert cfg.get("output", "figure_dpi") == 110
    assert cfg.get("output", "record_timings") is False


def test_given_values_override_defaults():
    cfg = parse_config({
        "grid": {"dim": 2, "extents": [5, 7], "topology": "box"},
        "solver": {"eigen_tol": 1e-8},
    })
    assert cfg.get("grid", "dim") == 2
    assert cfg.get("grid", "extents") == [5, 7]
    assert cfg.get("grid", "topology") == "box"
    assert cfg.get("grid", "cells_per_unit") == 4
    assert cfg.get("solver", "eigen_tol") == 1e-8


def test_unknown_section_rejected():
    with pytest.raises(ConfigError, match="unknown top-level section"):
        parse_config({"gird": {}})


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config({"grid": {"dims": 2}})
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config({"solver": {"eigen_tol": 1e-9, "tol": 1e-9}})


def test_wrong_type_rejected():
    with pytest.raises(ConfigError, match="grid.dim"):
        parse_config({"grid": {"dim": "1"}})
    with pytest.raises(ConfigError, match="grid.extents"):
        parse_config({"grid": {"extents": 8}})
    with pytest.raises(ConfigError, match="output.dir"):
        parse_config({"output": {"dir": 3}})


def test_bool_is_not_a_number():
    # bool is an int subclass; the schema must still reject it where a
    # numeric value is expected, and reject numbers where a flag is expected
    with pytest.raises(ConfigError, match="got bool"):
        parse_config({"solver": {"eigen_tol": True}})
    with pytest.raises(ConfigError, match="got bool"):
        parse_config({"grid": {"dim": True}})
    with pytest.raises(ConfigError, match="output.figures"):
        parse_config({"output": {"figures": 1}})


def test_root_and_sections_must_be_objects():
    with pytest.raises(ConfigError, match="root must be an object"):
        parse_config([1, 2])
    with pytest.raises(ConfigError, match="must be an object"):
        parse_config({"grid": [1]})


def test_grid_validation_rules():
    with pytest.raises(ConfigError, match="dim must be 1 or 2"):
        parse_config({"grid": {"dim": 3}})
    with pytest.raises(ConfigError, match="one positive integer per axis"):
        parse_config({"grid": {"dim": 1, "extents": [4, 4]}})
    with pytest.raises(ConfigError, match="one positive integer per axis"):
        parse_config({"grid": {"dim": 1, "extents": [0]}})
    with pytest.raises(ConfigError, match="topology"):
        parse_config({"grid": {"topology": "klein"}})
    with pytest.raises(ConfigError, match="cells_per_unit"):
        parse_config({"grid": {"cells_per_unit": 0}})


def test_coefficients_validation_rules():
    with pytest.raises(ConfigError, match="source"):
        parse_config({"coefficients": {"source": "magic"}})
    with pytest.raises(ConfigError, match="file is required"):
        parse_config({"coefficients": {"source": "file"}})
    with pytest.raises(ConfigError, match="generator"):
        parse_config({"coefficients": {"generator": "gauss"}})
    with pytest.raises(ConfigError, match="value is required"):
        parse_config({"coefficients": {"generator": "constant"}})
    with pytest.raises(ConfigError, match="prob"):
        parse_config({"coefficients": {"prob": 1.5}})
    with pytest.raises(ConfigError, match="prob"):
        parse_config({"coefficients": {"prob": -0.1}})


def test_solver_validation_rules():
    with pytest.raises(ConfigError, match="eigen_method"):
        parse_config({"solver": {"eigen_method": "qr"}})
    with pytest.raises(ConfigError, match="positive"):
        parse_config({"solver": {"eigen_tol": 0.0}})
    with pytest.raises(ConfigError, match="positive"):
        parse_config({"solver": {"landscape_tol": -1e-12}})


def test_analysis_validation_rules():
    for bad in ("lambda0", "lambda", "lam1", "lambda1.5", "lambda01"):
        with pytest.raises(ConfigError, match="mu_bar"):
            parse_config({"analysis": {"mu_bar": bad}})
    parse_config({"analysis": {"mu_bar": "lambda12"}})
    parse_config({"analysis": {"mu_bar": 0.75}})
    with pytest.raises(ConfigError, match="delta"):
        parse_config({"analysis": {"delta": "2/T"}})
    parse_config({"analysis": {"delta": 0.01}})
    for bad_alpha in (0.0, 1.0, -0.2, 2.0):
        with pytest.raises(ConfigError, match="alpha"):
            parse_config({"analysis": {"alpha": bad_alpha}})
    with pytest.raises(ConfigError, match="merge_threshold"):
        parse_config({"analysis": {"merge_threshold": -1.0}})
    with pytest.raises(ConfigError, match="stencil"):
        parse_config({"analysis": {"stencil": "knight"}})
    with pytest.raises(ConfigError, match="counts"):
        parse_config({"analysis": {"k_eigs": 0}})
    with pytest.raises(ConfigError, match="counts"):
        parse_config({"analysis": {"k_per_well": 0}})
    with pytest.raises(ConfigError, match="counts"):
        parse_config({"analysis": {"identity_trials": 0}})


def test_ensemble_validation_rules():
    with pytest.raises(ConfigError, match="T_values"):
        parse_config({"ensemble": {"T_values": [2]}})
    with pytest.raises(ConfigError, match="T_values"):
        parse_config({"ensemble": {"T_values": [8, "16"]}})
    with pytest.raises(ConfigError, match="realizations"):
        parse_config({"ensemble": {"realizations": 0}})
    with pytest.raises(ConfigError, match="threads"):
        parse_config({"ensemble": {"threads": 0}})
    parse_config({"ensemble": {"T_values": [3, 8, 16]}})


def test_demo2d_validation_rules():
    with pytest.raises(ConfigError, match="seeds"):
        parse_config({"demo2d": {"seeds": [0, 1.5]}})
    with pytest.raises(ConfigError, match="demo2d.T"):
        parse_config({"demo2d": {"T": 2}})
    with pytest.raises(ConfigError, match="target_eig"):
        parse_config({"demo2d": {"target_eig": 0}})
    with pytest.raises(ConfigError, match="target_eig"):
        parse_config({"demo2d": {"k_eigs": 4, "target_eig": 5}})
    parse_config({"demo2d": {"k_eigs": 4, "target_eig": 4}})


def test_output_validation_rules():
    with pytest.raises(ConfigError, match="figure_dpi"):
        parse_config({"output": {"figure_dpi": 5}})


def test_echo_is_verbatim_and_detached():
    raw = {"grid": {"dim": 2, "extents": [4, 4]}, "output": {"figures": False}}
    cfg = parse_config(raw)
    echoed = cfg.echo()
    assert echoed == raw
    echoed["grid"]["dim"] = 99
    assert cfg.raw["grid"]["dim"] == 2
    # defaults never leak into the echo
    assert "solver" not in echoed


def test_section_returns_a_copy():
    cfg = parse_config({})
    sec = cfg.section("grid")
    sec["dim"] = 99
    assert cfg.get("grid", "dim") == 1


def test_resolve_mu_bar():
    assert resolve_mu_bar("lambda1") == ("index", 1)
    assert resolve_mu_bar("lambda37") == ("index", 37)
    assert resolve_mu_bar(0.75) == ("value", 0.75)
    assert resolve_mu_bar(2) == ("value", 2.0)
    with pytest.raises(ConfigError):
        resolve_mu_bar("lambdaX")


def test_resolve_delta():
    assert resolve_delta("1/T", 256) == 1.0 / 256.0
    assert resolve_delta(0.05, 999) == 0.05
    with pytest.raises(ConfigError):
        resolve_delta("2/T", 8)
    with pytest.raises(ConfigError):
        resolve_delta(0.0, 8)
    with pytest.raises(ConfigError):
        resolve_delta(-1.0, 8)


def test_load_config_file_roundtrip(tmp_path):
    raw = {"grid": {"dim": 1, "extents": [16]}, "coefficients": {"seed": 3}}
    path = tmp_path / "run.json"
    path.write_text(json.dumps(raw))
    cfg = load_config(path)
    assert isinstance(cfg, RunConfig)
    assert cfg.raw == raw
    assert cfg.get("coefficients", "seed") == 3


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read config"):
        load_config(tmp_path / "nope.json")


def test_load_config_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{ not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(path)
