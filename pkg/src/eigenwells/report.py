"""Deterministic output writers: delimited records, JSON, and figures.

Every float is printed with 17 significant digits so values round-trip
exactly and repeated runs produce byte-identical files.  JSON is emitted by a
small recursive writer (the stdlib encoder formats floats with shortest-repr,
which round-trips but does not honor a fixed digit count).  Figures render
through the Agg backend with fixed dpi and stripped writer metadata, so PNG
bytes are also reproducible.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .grid import GridSpec
from .landscape import Landscape
from .wells import WellPartition

__all__ = [
    "fmt_float",
    "write_csv",
    "write_json",
    "fig_landscape_1d",
    "fig_wells_1d",
    "fig_eigenvectors_1d",
    "fig_distance_1d",
    "fig_margins",
    "fig_ensemble_fit",
    "fig_heatmap_2d",
    "FIGURE_DPI",
]

FIGURE_DPI = 110


def fmt_float(x) -> str:
    """17-significant-digit decimal form (exact float round-trip)."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return fmt_float(value)
    text = str(value)
    if any(ch in text for ch in ",\"\n"):
        text = '"' + text.replace('"', '""') + '"'
    return text


def write_csv(path: str | Path, header: list[str], rows) -> None:
    """Comma-delimited file with deterministic float formatting."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _json_fragments(obj, indent: int, out: list[str]) -> None:
    pad = " " * indent
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            # JSON has no literals for these; emit strings for portability
            out.append(f'"{fmt_float(x)}"')
        else:
            out.append(fmt_float(x))
    elif isinstance(obj, str):
        out.append(
            '"' + obj.replace("\\", "\\\\").replace('"', '\\"')
            .replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t") + '"'
        )
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for i, (key, val) in enumerate(items):
            out.append(pad + "  ")
            _json_fragments(str(key), indent + 2, out)
            out.append(": ")
            _json_fragments(val, indent + 2, out)
            out.append(",\n" if i + 1 < len(items) else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            out.append("[]")
            return
        out.append("[\n")
        for i, val in enumerate(seq):
            out.append(pad + "  ")
            _json_fragments(val, indent + 2, out)
            out.append(",\n" if i + 1 < len(seq) else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def write_json(path: str | Path, obj) -> None:
    """JSON file with 17-significant-digit floats and stable layout."""
    out: list[str] = []
    _json_fragments(obj, 0, out)
    Path(path).write_text("".join(out) + "\n")


def _save(fig, path: str | Path, dpi: int) -> None:
    fig.savefig(str(path), dpi=dpi, metadata={"Software": None})
    plt.close(fig)


def _axis_coords(grid: GridSpec) -> np.ndarray:
    return grid.positions()[:, 0]


def fig_landscape_1d(path, grid: GridSpec, V: np.ndarray, landscape: Landscape,
                     dpi: int = FIGURE_DPI) -> None:
    """Potential, landscape function, and effective potential on one axis."""
    x = _axis_coords(grid)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
    ax1.plot(x, V, lw=0.7, color="0.6", label="V")
    ax1.plot(x, landscape.W, lw=1.2, color="C3", label="W = 1/u")
    ax1.legend(loc="upper right")
    ax1.set_ylabel("potential")
    ax2.plot(x, landscape.u, lw=1.2, color="C0", label="u")
    ax2.axhline(1.0 / landscape.op.v_bar, color="0.3", ls="--", lw=0.8,
                label="1/v_bar floor")
    ax2.legend(loc="upper right")
    ax2.set_xlabel("position")
    ax2.set_ylabel("landscape u")
    fig.tight_layout()
    _save(fig, path, dpi)


def fig_wells_1d(path, grid: GridSpec, landscape: Landscape,
                 partition: WellPartition, dpi: int = FIGURE_DPI) -> None:
    """Effective potential with the well clusters and threshold level."""
    x = _axis_coords(grid)
    fig, ax = plt.subplots(figsize=(8, 3.2))
    ax.plot(x, landscape.W, lw=1.0, color="C3", label="W")
    ax.axhline(partition.nu, color="0.3", ls="--", lw=0.8, label="threshold")
    for ell, cluster in enumerate(partition.clusters):
        ax.plot(x[cluster], landscape.W[cluster], ".", ms=3, label=f"cluster {ell}"
                if ell < 8 else None)
    ax.set_xlabel("position")
    ax.set_ylabel("W")
    ax.legend(loc="upper right", fontsize=7, ncol=2)
    fig.tight_layout()
    _save(fig, path, dpi)


def fig_eigenvectors_1d(path, grid: GridSpec, values: np.ndarray,
                        vectors: np.ndarray, count: int | None = None,
                        dpi: int = FIGURE_DPI) -> None:
    """First eigenvectors over position, labeled by eigenvalue."""
    x = _axis_coords(grid)
    count = values.size if count is None else min(count, values.size)
    fig, ax = plt.subplots(figsize=(8, 3.2))
    for j in range(count):
        ax.plot(x, vectors[:, j], lw=0.9, label=f"{j + 1}: {values[j]:.5f}")
    ax.set_xlabel("position")
    ax.set_ylabel("eigenvector")
    ax.legend(loc="upper right", fontsize=7, ncol=2)
    fig.tight_layout()
    _save(fig, path, dpi)


def fig_distance_1d(path, grid: GridSpec, h: np.ndarray, dpi: int = FIGURE_DPI) -> None:
    """Distance-to-wells profile over position."""
    x = _axis_coords(grid)
    fig, ax = plt.subplots(figsize=(8, 3.0))
    ax.plot(x, h, lw=1.0, color="C2")
    ax.set_xlabel("position")
    ax.set_ylabel("distance to wells")
    fig.tight_layout()
    _save(fig, path, dpi)


def fig_margins(path, reports, dpi: int = FIGURE_DPI) -> None:
    """Log-scale lhs vs slack*rhs margins for a list of check reports."""
    names = [r.name for r in reports]
    ratios = []
    for r in reports:
        if r.skipped or not np.isfinite(r.lhs) or r.rhs <= 0.0:
            ratios.append(np.nan)
        else:
            ratios.append(max(r.lhs / (r.rhs * r.slack), 1e-300))
    fig, ax = plt.subplots(figsize=(max(6, 0.45 * len(names) + 2), 3.4))
    pos = np.arange(len(names))
    ax.bar(pos, ratios, color=["C0" if r.passed else "C3" for r in reports])
    ax.axhline(1.0, color="0.2", ls="--", lw=0.8)
    ax.set_yscale("log")
    ax.set_xticks(pos)
    ax.set_xticklabels(names, rotation=60, ha="right", fontsize=6)
    ax.set_ylabel("lhs / (slack * rhs)")
    fig.tight_layout()
    _save(fig, path, dpi)


def fig_ensemble_fit(path, summary, dpi: int = FIGURE_DPI) -> None:
    """Median separation against size on log-log axes with the fitted line."""
    Ts = sorted(T for T, e in summary.per_T.items()
                if np.isfinite(e.get("median_S_min", np.inf)))
    med = [summary.per_T[T]["median_S_min"] for T in Ts]
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ax.loglog(Ts, med, "o", color="C0", label="median S")
    ts = np.array(Ts, dtype=float)
    ax.loglog(ts, summary.fit_prefactor * ts**summary.fit_exponent, "-",
              color="C3",
              label=f"{summary.fit_prefactor:.3f} T^{summary.fit_exponent:.3f}")
    ax.set_xlabel("T")
    ax.set_ylabel("median separation")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    _save(fig, path, dpi)


def fig_heatmap_2d(path, grid: GridSpec, field: np.ndarray, label: str,
                   overlay: np.ndarray | None = None, dpi: int = FIGURE_DPI) -> None:
    """Heat map of a nodal field on a 2D grid, optional boolean overlay.

    The overlay (e.g. a sublevel set) is drawn as a translucent mask.
    """
    n0, n1 = grid.shape
    img = field.reshape(n1, n0)  # row-major with axis 0 fastest
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    im = ax.imshow(img, origin="lower", cmap="viridis",
                   extent=(0, grid.extent_units[0], 0, grid.extent_units[1]))
    if overlay is not None:
        mask = np.where(overlay.reshape(n1, n0), 1.0, np.nan)
        ax.imshow(mask, origin="lower", cmap="autumn", alpha=0.45,
                  extent=(0, grid.extent_units[0], 0, grid.extent_units[1]))
    fig.colorbar(im, ax=ax, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.tight_layout()
    _save(fig, path, dpi)
