"""Strict JSON run configuration for the command-line frontend.

One JSON file drives every subcommand.  Parsing is fail-fast: unknown keys
anywhere, wrong types, and out-of-range values raise ConfigError before any
computation starts.  The parsed dictionary is kept verbatim so outputs can
echo the exact configuration they were produced from.

Schema (all sections optional unless a subcommand needs them; defaults in
parentheses)::

    {
      "grid": {
        "dim": 1 | 2,
        "extents": [int, ...],          # units per axis
        "cells_per_unit": int (4),
        "topology": "torus" | "box" ("torus")
      },
      "coefficients": {
        "source": "generator" | "file",
        "generator": "uniform1d" | "bernoulli2d" | "constant",
        "seed": int (0),                # generator seed
        "v_bar": float (4.0),           # uniform1d amplitude / explicit bound
        "v_high": float (4.0),          # bernoulli2d barrier height
        "prob": float (0.3),            # bernoulli2d barrier probability
        "value": float,                 # constant generator level
        "file": str                     # CSV path for source = "file"
      },
      "solver": {
        "eigen_tol": float (1e-10),
        "landscape_tol": float (1e-12),
        "eigen_method": "auto" | "dense" | "lanczos" ("auto"),
        "v0_seed": int (default start-vector seed),
        "refine_tails": bool (true)
      },
      "analysis": {
        "mu_bar": "lambda<j>" | float ("lambda1"),
        "delta": "1/T" | float ("1/T"),
        "alpha": float (0.5),
        "merge_threshold": float (0.0),
        "k_eigs": int (6),
        "k_per_well": int (4),
        "stencil": "axis" | "diagonal" ("axis"),
        "slack": float (2.0),
        "identity_trials": int (20)
      },
      "ensemble": {
        "T_values": [int, ...],
        "realizations": int (200),
        "base_seed": int (0),
        "threads": int (1)
      },
      "demo2d": {
        "T": int (80),
        "prob": float (0.3),
        "v_high": float (4.0),
        "seeds": [int, ...] ([0]),
        "k_eigs": int (20),
        "target_eig": int (5)
      },
      "output": {
        "dir": str ("out"),
        "figures": bool (true),
        "figure_dpi": int (110),
        "record_timings": bool (false)
      }
    }

``mu_bar: "lambda<j>"`` resolves to the j-th smallest eigenvalue of the
instance (1-based); ``delta: "1/T"`` resolves to one over the first grid
extent.  ``record_timings`` keeps wall-clock milliseconds out of the written
records by default so that re-runs are byte-identical.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .eigensolve import DEFAULT_V0_SEED

__all__ = ["RunConfig", "load_config", "parse_config", "resolve_mu_bar", "resolve_delta"]

_SCHEMA: dict[str, dict[str, tuple]] = {
    # section -> key -> (types, default)
    "grid": {
        "dim": ((int,), 1),
        "extents": ((list,), None),
        "cells_per_unit": ((int,), 4),
        "topology": ((str,), "torus"),
    },
    "coefficients": {
        "source": ((str,), "generator"),
        "generator": ((str,), "uniform1d"),
        "seed": ((int,), 0),
        "v_bar": ((int, float), 4.0),
        "v_high": ((int, float), 4.0),
        "prob": ((int, float), 0.3),
        "value": ((int, float), None),
        "file": ((str,), None),
    },
    "solver": {
        "eigen_tol": ((int, float), 1e-10),
        "landscape_tol": ((int, float), 1e-12),
        "eigen_method": ((str,), "auto"),
        "v0_seed": ((int,), DEFAULT_V0_SEED),
        "refine_tails": ((bool,), True),
    },
    "analysis": {
        "mu_bar": ((str, int, float), "lambda1"),
        "delta": ((str, int, float), "1/T"),
        "alpha": ((int, float), 0.5),
        "merge_threshold": ((int, float), 0.0),
        "k_eigs": ((int,), 6),
        "k_per_well": ((int,), 4),
        "stencil": ((str,), "axis"),
        "slack": ((int, float), 2.0),
        "identity_trials": ((int,), 20),
    },
    "ensemble": {
        "T_values": ((list,), None),
        "realizations": ((int,), 200),
        "base_seed": ((int,), 0),
        "threads": ((int,), 1),
    },
    "demo2d": {
        "T": ((int,), 80),
        "prob": ((int, float), 0.3),
        "v_high": ((int, float), 4.0),
        "seeds": ((list,), None),
        "k_eigs": ((int,), 20),
        "target_eig": ((int,), 5),
    },
    "output": {
        "dir": ((str,), "out"),
        "figures": ((bool,), True),
        "figure_dpi": ((int,), 110),
        "record_timings": ((bool,), False),
    },
}

_MU_BAR_RE = re.compile(r"^lambda([1-9][0-9]*)$")


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration plus the raw dictionary for provenance echo."""

    raw: dict
    sections: dict = field(repr=False)

    def section(self, name: str) -> dict:
        """Resolved (defaults applied) key/value map of one section."""
        return dict(self.sections[name])

    def get(self, section: str, key: str):
        return self.sections[section][key]

    def echo(self) -> dict:
        """The configuration exactly as given, for embedding in outputs."""
        return json.loads(json.dumps(self.raw))


def _check_section(name: str, given: dict) -> dict:
    schema = _SCHEMA[name]
    unknown = sorted(set(given) - set(schema))
    if unknown:
        raise ConfigError(f"unknown key(s) in section {name!r}: {', '.join(unknown)}")
    resolved = {}
    for key, (types, default) in schema.items():
        if key in given:
            val = given[key]
            if isinstance(val, bool) and bool not in types:
                raise ConfigError(f"{name}.{key}: expected {types}, got bool")
            if not isinstance(val, types):
                raise ConfigError(
                    f"{name}.{key}: expected {' or '.join(t.__name__ for t in types)},"
                    f" got {type(val).__name__}"
                )
            resolved[key] = val
        else:
            resolved[key] = default
    return resolved


def _validate(sections: dict) -> None:
    g = sections["grid"]
    if g["dim"] not in (1, 2):
        raise ConfigError(f"grid.dim must be 1 or 2, got {g['dim']}")
    if g["extents"] is not None:
        if len(g["extents"]) != g["dim"] or not all(
            isinstance(t, int) and t > 0 for t in g["extents"]
        ):
            raise ConfigError("grid.extents must list one positive integer per axis")
    if g["topology"] not in ("torus", "box"):
        raise ConfigError(f"grid.topology must be 'torus' or 'box', got {g['topology']!r}")
    if g["cells_per_unit"] < 1:
        raise ConfigError("grid.cells_per_unit must be >= 1")

    c = sections["coefficients"]
    if c["source"] not in ("generator", "file"):
        raise ConfigError(f"coefficients.source must be 'generator' or 'file', got {c['source']!r}")
    if c["source"] == "file" and not c["file"]:
        raise ConfigError("coefficients.file is required when source = 'file'")
    if c["source"] == "generator" and c["generator"] not in (
        "uniform1d", "bernoulli2d", "constant",
    ):
        raise ConfigError(f"unknown coefficients.generator {c['generator']!r}")
    if c["generator"] == "constant" and c["source"] == "generator" and c["value"] is None:
        raise ConfigError("coefficients.value is required for the constant generator")
    if not 0.0 <= float(c["prob"]) <= 1.0:
        raise ConfigError("coefficients.prob must lie in [0, 1]")

    s = sections["solver"]
    if s["eigen_method"] not in ("auto", "dense", "lanczos"):
        raise ConfigError(f"solver.eigen_method must be auto/dense/lanczos, got {s['eigen_method']!r}")
    if not (s["eigen_tol"] > 0 and s["landscape_tol"] > 0):
        raise ConfigError("solver tolerances must be positive")

    a = sections["analysis"]
    if isinstance(a["mu_bar"], str) and not _MU_BAR_RE.match(a["mu_bar"]):
        raise ConfigError(f"analysis.mu_bar must be a number or 'lambda<j>', got {a['mu_bar']!r}")
    if isinstance(a["delta"], str) and a["delta"] != "1/T":
        raise ConfigError(f"analysis.delta must be a number or '1/T', got {a['delta']!r}")
    if not 0.0 < float(a["alpha"]) < 1.0:
        raise ConfigError("analysis.alpha must lie in (0, 1)")
    if float(a["merge_threshold"]) < 0.0:
        raise ConfigError("analysis.merge_threshold must be >= 0")
    if a["stencil"] not in ("axis", "diagonal"):
        raise ConfigError(f"analysis.stencil must be 'axis' or 'diagonal', got {a['stencil']!r}")
    if a["k_eigs"] < 1 or a["k_per_well"] < 1 or a["identity_trials"] < 1:
        raise ConfigError("analysis counts must be >= 1")

    e = sections["ensemble"]
    if e["T_values"] is not None and not all(
        isinstance(t, int) and t >= 3 for t in e["T_values"]
    ):
        raise ConfigError("ensemble.T_values must be integers >= 3")
    if e["realizations"] < 1 or e["threads"] < 1:
        raise ConfigError("ensemble.realizations and ensemble.threads must be >= 1")

    d = sections["demo2d"]
    if d["seeds"] is not None and not all(isinstance(x, int) for x in d["seeds"]):
        raise ConfigError("demo2d.seeds must be a list of integers")
    if d["T"] < 3 or d["k_eigs"] < 1:
        raise ConfigError("demo2d.T must be >= 3 and demo2d.k_eigs >= 1")
    if not 1 <= d["target_eig"] <= d["k_eigs"]:
        raise ConfigError("demo2d.target_eig must lie in [1, k_eigs]")

    o = sections["output"]
    if o["figure_dpi"] < 10:
        raise ConfigError("output.figure_dpi must be >= 10")


def parse_config(data: dict) -> RunConfig:
    """Validate an already-decoded configuration dictionary."""
    if not isinstance(data, dict):
        raise ConfigError(f"configuration root must be an object, got {type(data).__name__}")
    unknown = sorted(set(data) - set(_SCHEMA))
    if unknown:
        raise ConfigError(f"unknown top-level section(s): {', '.join(unknown)}")
    sections = {}
    for name in _SCHEMA:
        given = data.get(name, {})
        if not isinstance(given, dict):
            raise ConfigError(f"section {name!r} must be an object")
        sections[name] = _check_section(name, given)
    _validate(sections)
    return RunConfig(raw=data, sections=sections)


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a JSON configuration file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {p} is not valid JSON: {exc}") from exc
    return parse_config(data)


def resolve_mu_bar(spec: str | float) -> tuple[str, int | float]:
    """Split a mu_bar setting into ("index", j) or ("value", x)."""
    if isinstance(spec, str):
        m = _MU_BAR_RE.match(spec)
        if not m:
            raise ConfigError(f"bad mu_bar spec {spec!r}")
        return "index", int(m.group(1))
    return "value", float(spec)


def resolve_delta(spec: str | float, T: int) -> float:
    """Resolve a delta setting against the instance size."""
    if isinstance(spec, str):
        if spec != "1/T":
            raise ConfigError(f"bad delta spec {spec!r}")
        return 1.0 / float(T)
    val = float(spec)
    if val <= 0.0:
        raise ConfigError("delta must be positive")
    return val
