"""Random instance generators and the ensemble separation statistic.

Potentials are piecewise constant over unit cells: the generator draws one
value per cell from the splitmix64 stream (see :mod:`eigenwells.rng`) and
replicates it across the ``cells_per_unit`` nodes of the cell, so a given
(seed, T) pair yields the same instance at every resolution.  1D draws are
uniform on [0, v_bar); 2D draws are v_high with probability prob, else 0,
in cell order t0 + T * t1 (axis 0 fastest, matching node order).

A realization solves the landscape, takes the two lowest eigenvalues, forms
the sublevel set E(lambda_1 + delta) (delta = 1/T by default), and measures
the Agmon separations (shift lambda_1) between circularly consecutive
components.  A single-component realization has no finite separation; it is
recorded with the +inf sentinel and flagged, and that sentinel ranks above
every finite value in the medians (the separation is censored above, not
missing).  Aggregation takes per-size lower medians of the minimum
separation over all usable realizations and fits
log median = log prefactor + exponent * log T over sizes whose median is
finite and positive.
"""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .agmon import agmon_weight, build_cost_graph, distance_to_set
from .eigensolve import eig_smallest
from .errors import AllZeroRealization, EigenwellsError, InsufficientData
from .grid import TORUS, GridSpec, build_grid
from .landscape import solve_landscape
from .operators import CoefficientField, assemble, make_coefficient_field
from .rng import PRNG_ID, SplitMix64
from .wells import components, sublevel_set

__all__ = [
    "RealizationRecord",
    "EnsembleSummary",
    "gen_uniform_1d",
    "gen_bernoulli_2d",
    "gen_constant",
    "run_realization",
    "run_ensemble",
    "aggregate",
    "per_size_stats",
    "RECORD_FIELDS",
]

RECORD_FIELDS = [
    "seed", "T", "lambda1", "lambda2", "gap", "delta",
    "component_count", "S_min", "S_median", "runtime_ms", "error_tag",
]


def _replicate_cells_1d(cells: np.ndarray, grid: GridSpec) -> np.ndarray:
    p = grid.cells_per_unit
    vals = np.repeat(cells, p)
    if grid.topology != TORUS:
        vals = np.append(vals, cells[-1])  # closing endpoint shares the last cell
    return vals


def gen_uniform_1d(seed: int, T: int, v_bar: float = 4.0, cells_per_unit: int = 4,
                   topology: str = TORUS) -> tuple[GridSpec, CoefficientField]:
    """1D torus instance with one Uniform[0, v_bar) draw per unit cell."""
    grid = build_grid(1, [T], cells_per_unit, topology)
    rng = SplitMix64(seed)
    cells = v_bar * rng.floats(T)
    V = _replicate_cells_1d(cells, grid)
    coeffs = make_coefficient_field(grid, V, v_bar=v_bar)
    return grid, coeffs


def gen_bernoulli_2d(seed: int, T: int, v_high: float = 4.0, prob: float = 0.3,
                     cells_per_unit: int = 4, topology: str = TORUS) -> tuple[GridSpec, CoefficientField]:
    """2D torus instance: each unit cell is v_high with probability prob, else 0.

    Raises AllZeroRealization when every draw missed (the operator would be
    singular); callers typically retry with a displaced seed.
    """
    if not 0.0 < prob < 1.0:
        raise ValueError(f"prob must lie strictly inside (0, 1), got {prob}")
    grid = build_grid(2, [T, T], cells_per_unit, topology)
    rng = SplitMix64(seed)
    draws = rng.floats(T * T)
    cells = np.where(draws < prob, v_high, 0.0).reshape(T, T)  # [t1, t0]
    if not np.any(cells > 0.0):
        raise AllZeroRealization(f"all {T}x{T} cells drew zero at seed {seed}")
    p = grid.cells_per_unit
    Vgrid = np.repeat(np.repeat(cells, p, axis=0), p, axis=1)
    if grid.topology != TORUS:
        Vgrid = np.pad(Vgrid, ((0, 1), (0, 1)), mode="edge")
    coeffs = make_coefficient_field(grid, Vgrid.ravel(), v_bar=v_high)
    return grid, coeffs


def gen_constant(T: int, value: float, dim: int = 1, cells_per_unit: int = 4,
                 topology: str = TORUS) -> tuple[GridSpec, CoefficientField]:
    """Constant-potential instance (useful as a degenerate control)."""
    grid = build_grid(dim, [T] * dim, cells_per_unit, topology)
    coeffs = make_coefficient_field(grid, np.full(grid.node_count, float(value)))
    return grid, coeffs


@dataclass(frozen=True)
class RealizationRecord:
    seed: int
    T: int
    lambda1: float
    lambda2: float
    gap: float
    delta: float
    component_count: int
    S_min: float
    S_median: float
    runtime_ms: float
    error_tag: str = ""

    def row(self) -> list:
        return [self.seed, self.T, self.lambda1, self.lambda2, self.gap, self.delta,
                self.component_count, self.S_min, self.S_median, self.runtime_ms,
                self.error_tag]


def _lower_median(values: list[float]) -> float:
    return float(statistics.median_low(values))


def run_realization(
    seed: int,
    T: int,
    v_bar: float = 4.0,
    cells_per_unit: int = 4,
    delta: float | None = None,
    eigen_tol: float = 1e-10,
    landscape_tol: float = 1e-12,
    generator: str = "uniform1d",
    constant_value: float | None = None,
) -> RealizationRecord:
    """Full 1D pipeline for one random instance (see module docstring)."""
    t0 = time.perf_counter()
    if generator == "uniform1d":
        grid, coeffs = gen_uniform_1d(seed, T, v_bar, cells_per_unit)
    elif generator == "constant":
        if constant_value is None or constant_value <= 0.0:
            raise AllZeroRealization("constant generator needs a positive value")
        grid, coeffs = gen_constant(T, constant_value, 1, cells_per_unit)
    else:
        raise ValueError(f"unknown generator {generator!r}")
    if delta is None:
        delta = 1.0 / T
    op = assemble(grid, coeffs)
    ls = solve_landscape(op, tol=landscape_tol)
    es = eig_smallest(op, 2, tol=eigen_tol)
    lam1, lam2 = float(es.values[0]), float(es.values[1])
    E = sublevel_set(ls, lam1 + delta)
    comps = components(grid, E)
    count = len(comps)
    error_tag = ""
    if count >= 2:
        weight = agmon_weight(ls, lam1)
        graph = build_cost_graph(weight)
        seps = []
        for i in range(count):
            nxt = comps[(i + 1) % count]
            fieldd = distance_to_set(weight, comps[i], graph=graph)
            seps.append(float(fieldd.h[nxt].min()))
        s_min = min(seps)
        s_median = _lower_median(seps)
    else:
        s_min = s_median = float("inf")
        error_tag = "single_component"
    runtime_ms = (time.perf_counter() - t0) * 1e3
    return RealizationRecord(
        seed=int(seed), T=int(T), lambda1=lam1, lambda2=lam2, gap=lam2 - lam1,
        delta=float(delta), component_count=count, S_min=s_min, S_median=s_median,
        runtime_ms=runtime_ms, error_tag=error_tag,
    )


@dataclass(frozen=True)
class EnsembleSummary:
    per_T: dict
    fit_prefactor: float
    fit_exponent: float
    prng: str = PRNG_ID
    medians_nondecreasing: bool = True
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "per_T": self.per_T,
            "fit": {"prefactor": self.fit_prefactor, "exponent": self.fit_exponent},
            "prng": self.prng,
            "medians_nondecreasing": self.medians_nondecreasing,
            "params": self.params,
        }


def per_size_stats(records: list[RealizationRecord]) -> dict[int, dict]:
    """Per-T medians, censoring counts, and gap fractions (no fit).

    Medians run over every realization with a defined separation: the +inf
    sentinel of single-component realizations participates, ranking above
    all finite values (the separation is censored above, not missing), while
    failed realizations (NaN statistics) are excluded and counted.
    """
    records = sorted(records, key=lambda r: (r.T, r.seed))
    per_T: dict[int, dict] = {}
    for T in sorted({r.T for r in records}):
        group = [r for r in records if r.T == T]
        good = [r for r in group if not np.isnan(r.S_min)]
        entry = {
            "count": len(group),
            "failed": len(group) - len(good),
            "censored": sum(1 for r in good if not np.isfinite(r.S_min)),
            "gap_fraction": float(np.mean([r.gap > 1.0 / T for r in group])),
        }
        if good:
            entry["median_S_min"] = _lower_median([r.S_min for r in good])
            entry["median_S_median"] = _lower_median([r.S_median for r in good])
        per_T[T] = entry
    return per_T


def aggregate(records: list[RealizationRecord], min_sizes: int = 3) -> EnsembleSummary:
    """Per-T statistics and the log-log power-law fit of the median separation.

    Records are sorted by (T, seed) first, so the result is independent of
    input order.  The per-size medians follow :func:`per_size_stats`; the fit
    uses the sizes whose median is finite and positive.

    Raises InsufficientData with fewer than ``min_sizes`` such sizes.
    """
    per_T = per_size_stats(records)
    usable = [(T, e["median_S_min"]) for T, e in per_T.items()
              if "median_S_min" in e and np.isfinite(e["median_S_min"])
              and e["median_S_min"] > 0.0]
    if len(usable) < min_sizes:
        raise InsufficientData(
            f"power-law fit needs >= {min_sizes} distinct sizes, got {len(usable)}"
        )
    logT = np.log([t for t, _ in usable])
    logS = np.log([s for _, s in usable])
    exponent, intercept = np.polyfit(logT, logS, 1)
    medians = [s for _, s in usable]
    nondec = all(b >= a for a, b in zip(medians, medians[1:]))
    return EnsembleSummary(
        per_T=per_T,
        fit_prefactor=float(np.exp(intercept)),
        fit_exponent=float(exponent),
        medians_nondecreasing=nondec,
        params={},
    )


def run_ensemble(
    T_values,
    realizations: int = 200,
    base_seed: int = 0,
    v_bar: float = 4.0,
    cells_per_unit: int = 4,
    threads: int = 1,
    eigen_tol: float = 1e-10,
    landscape_tol: float = 1e-12,
) -> tuple[list[RealizationRecord], EnsembleSummary]:
    """Run the full ensemble.  Realization index runs over ascending T blocks
    (seed = base_seed + index), so the record set is a pure function of the
    configuration regardless of thread count."""
    T_values = sorted(int(t) for t in T_values)
    tasks = []
    idx = 0
    for T in T_values:
        for _ in range(realizations):
            tasks.append((base_seed + idx, T))
            idx += 1

    def work(task):
        seed, T = task
        try:
            return run_realization(
                seed, T, v_bar=v_bar, cells_per_unit=cells_per_unit,
                eigen_tol=eigen_tol, landscape_tol=landscape_tol,
            )
        except EigenwellsError as exc:
            # recorded with an error tag rather than aborting the batch
            nan = float("nan")
            return RealizationRecord(
                seed=int(seed), T=int(T), lambda1=nan, lambda2=nan, gap=nan,
                delta=1.0 / T, component_count=0, S_min=nan, S_median=nan,
                runtime_ms=0.0, error_tag=type(exc).__name__,
            )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(work, tasks))
    else:
        records = [work(t) for t in tasks]
    records.sort(key=lambda r: (r.T, r.seed))
    summary = aggregate(records)
    summary.params.update(
        T_values=T_values, realizations=realizations, base_seed=base_seed,
        v_bar=v_bar, cells_per_unit=cells_per_unit,
    )
    return records, summary
