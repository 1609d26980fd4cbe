"""Numerical verification of the landscape identities and bounds.

Each check compares a computed left side against a bound (or exact right
side) and returns a :class:`CheckReport`.  Identity checks pass at a tight
relative tolerance; inequality checks carry a multiplicative slack (default
2) that absorbs the one-sided discretization error in the Agmon metric,
since the edge-Lipschitz property |h_i - h_j| <= cost(i, j) replaces the
continuum eikonal bound only up to a local consistency error.

Conventions shared by the bound checks, with v_bar the recorded potential
bound, mu_bar the well threshold, and delta the spectral margin:

* the Agmon weight and distances are taken at shift mu_bar;
* the distance field h starts from the sublevel set E(mu_bar + delta),
  minus the well complement for pairs localized to a well;
* the decay bound coefficient is 18 e (v_bar/delta) v_bar at alpha = 1/2 and
  (450 + 130 v_bar / ((1 - alpha) delta)) v_bar otherwise;
* the cutoff residual bound is eps * v_bar * ||phi||_M^2 with
  eps = 18 e^2 (v_bar/delta) exp(-S1/2) and S1 the minimum cluster
  separation S_bar;
* the projection bound coefficient is 300 (v_bar/delta)^3 exp(-S_bar/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .agmon import agmon_weight, distance_to_set
from .eigensolve import CountingFunction, EigenSet, LocalizedEigenSet, counting, spectral_project
from .errors import InadmissibleTestFunction, StaleLandscape
from .landscape import Landscape
from .operators import DiscreteOperator, quadratic_form
from .wells import WellPartition, sublevel_set

__all__ = [
    "CheckReport",
    "verify_identity",
    "verify_form_bound",
    "verify_eigen_identity",
    "verify_decay",
    "cutoff_residual_bound",
    "verify_projection",
    "verify_counting",
    "verify_landscape_floor",
    "decay_coefficient",
    "projection_coefficient",
    "counting_capacity",
]

IDENTITY_RTOL = 1e-9
EIGEN_IDENTITY_RTOL = 1e-8
FRESH_LANDSCAPE = 1e-10
PROJECTION_FLOOR = 1e-18  # absolute floor so an exact-zero bound tolerates roundoff


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one check: pass iff lhs <= rhs * slack (skipped checks never fail).

    ``margin`` is rhs * slack - lhs; ``vacuous`` flags bounds weaker than the
    trivial one; ``skipped`` marks checks whose hypotheses failed (recorded,
    not evaluated).
    """

    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    vacuous: bool = False
    skipped: bool = False
    notes: str = ""
    params: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.rhs * self.slack - self.lhs

    def to_dict(self) -> dict:
        def _jsonable(x):
            if isinstance(x, float) and not math.isfinite(x):
                return repr(x)
            if isinstance(x, np.floating):
                return float(x)
            if isinstance(x, np.integer):
                return int(x)
            if isinstance(x, dict):
                return {k: _jsonable(v) for k, v in x.items()}
            if isinstance(x, (list, tuple)):
                return [_jsonable(v) for v in x]
            return x

        return {
            "name": self.name,
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
            "slack": self.slack,
            "passed": bool(self.passed),
            "vacuous": bool(self.vacuous),
            "skipped": bool(self.skipped),
            "margin": _jsonable(self.margin),
            "notes": self.notes,
            "params": _jsonable(self.params),
        }

    def summary_line(self) -> str:
        status = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        extra = " (vacuous)" if self.vacuous else ""
        return f"{status} {self.name}: lhs={self.lhs:.6e} rhs={self.rhs:.6e} slack={self.slack:g}{extra}"

    def renamed(self, name: str) -> "CheckReport":
        """Copy with a new name (for numbering repeated checks in reports)."""
        return replace(self, name=name)


def _require_fresh(landscape: Landscape) -> None:
    if landscape.residual > FRESH_LANDSCAPE:
        raise StaleLandscape(
            f"landscape residual {landscape.residual:.3e} exceeds {FRESH_LANDSCAPE:.0e}"
        )


def _landscape_energy_sides(op: DiscreteOperator, u: np.ndarray, f: np.ndarray):
    """Edge and mass parts of the exact energy identity for K u = M 1."""
    ei, ej, _, c = op.edges
    g = f / u
    edge_term = float(np.dot(c * u[ei] * u[ej], (g[ei] - g[ej]) ** 2))
    mass_term = float(np.dot(f * f / u, op.M))
    return edge_term, mass_term


def verify_identity(op: DiscreteOperator, landscape: Landscape, f, rtol: float = IDENTITY_RTOL) -> CheckReport:
    """Exact energy identity: f^T K f = sum_e c u_i u_j (f_i/u_i - f_j/u_j)^2
    + sum_i (f_i^2 / u_i) M_ii, given K u = M 1."""
    _require_fresh(landscape)
    f = np.asarray(f, dtype=np.float64).ravel()
    lhs = quadratic_form(op, f)
    edge_term, mass_term = _landscape_energy_sides(op, landscape.u, f)
    rhs = edge_term + mass_term
    scale = max(abs(lhs), abs(rhs))
    passed = abs(lhs - rhs) <= rtol * scale if scale > 0 else True
    return CheckReport(
        name="energy_identity",
        lhs=lhs,
        rhs=rhs,
        slack=1.0 + rtol,
        passed=passed,
        notes="two-sided relative comparison",
        params={"rtol": rtol, "edge_term": edge_term, "mass_term": mass_term,
                "rel_err": abs(lhs - rhs) / scale if scale > 0 else 0.0},
    )


def verify_form_bound(op: DiscreteOperator, landscape: Landscape, f, rtol: float = IDENTITY_RTOL) -> CheckReport:
    """One-sided consequence of the identity: sum_i (f_i^2/u_i) M_ii <= f^T K f."""
    _require_fresh(landscape)
    f = np.asarray(f, dtype=np.float64).ravel()
    rhs = quadratic_form(op, f)
    _, lhs = _landscape_energy_sides(op, landscape.u, f)
    return CheckReport(
        name="form_bound",
        lhs=lhs,
        rhs=rhs,
        slack=1.0 + rtol,
        passed=lhs <= rhs * (1.0 + rtol),
        params={"rtol": rtol},
    )


def verify_eigen_identity(
    op: DiscreteOperator,
    landscape: Landscape,
    eigenpair: tuple[float, np.ndarray],
    g,
    rtol: float = EIGEN_IDENTITY_RTOL,
    dirichlet_set=None,
) -> CheckReport:
    """Identity for an eigenpair (mu, phi) and a test profile g:

    sum_e c u_i u_j (g_i phi_i / u_i - g_j phi_j / u_j)^2
      + sum_i (1/u_i - mu) (g_i phi_i)^2 M_ii
      = sum_e c phi_i phi_j (g_i - g_j)^2.

    ``phi`` is full-grid (zero-extended for well pairs); ``dirichlet_set``
    lists nodes where the pair's restriction forces phi = 0 (the product
    g^2 phi must vanish there, which zero-extension guarantees).
    """
    _require_fresh(landscape)
    mu, phi = eigenpair
    phi = np.asarray(phi, dtype=np.float64).ravel()
    g = np.asarray(g, dtype=np.float64).ravel()
    if dirichlet_set is not None and len(dirichlet_set) > 0:
        viol = np.flatnonzero((g[dirichlet_set] ** 2) * phi[dirichlet_set] != 0.0)
        if viol.size:
            raise InadmissibleTestFunction(
                f"g^2 phi nonzero on {viol.size} Dirichlet nodes (first: {dirichlet_set[viol[0]]})"
            )
    u = landscape.u
    ei, ej, _, c = op.edges
    f = g * phi
    q = f / u
    edge_term = float(np.dot(c * u[ei] * u[ej], (q[ei] - q[ej]) ** 2))
    shift_terms = (1.0 / u - mu) * f * f * op.M
    lhs = edge_term + float(shift_terms.sum())
    rhs_terms = c * phi[ei] * phi[ej] * (g[ei] - g[ej]) ** 2
    rhs = float(rhs_terms.sum())
    # The shift factor (1/u - mu) cancels catastrophically when W is flat at
    # the eigenvalue (e.g. constant V at the ground level), so the comparison
    # scale must include its pre-cancellation magnitude; a formula or assembly
    # defect would err at that scale, not at the rounding floor.
    shift_scale = float(np.dot(np.abs(1.0 / u) + abs(mu), f * f * op.M))
    scale = max(abs(lhs), abs(rhs), edge_term + float(np.abs(shift_terms).sum()),
                float(np.abs(rhs_terms).sum()), shift_scale, 1e-300)
    passed = abs(lhs - rhs) <= rtol * scale
    return CheckReport(
        name="eigen_identity",
        lhs=lhs,
        rhs=rhs,
        slack=1.0 + rtol,
        passed=passed,
        notes="two-sided relative comparison",
        params={"mu": float(mu), "rtol": rtol, "rel_err": abs(lhs - rhs) / scale},
    )


def decay_coefficient(v_bar: float, delta: float, alpha: float) -> float:
    """Bound coefficient for the exponential-decay check."""
    if alpha == 0.5:
        return 18.0 * math.e * (v_bar / delta) * v_bar
    return (450.0 + 130.0 * v_bar / ((1.0 - alpha) * delta)) * v_bar


def _edge_energy_share(op: DiscreteOperator, phi: np.ndarray) -> np.ndarray:
    """Per-node half-shares of the edge energy sum_e c (phi_i - phi_j)^2."""
    ei, ej, _, c = op.edges
    e = 0.5 * c * (phi[ei] - phi[ej]) ** 2
    share = np.zeros(op.dof)
    np.add.at(share, ei, e)
    np.add.at(share, ej, e)
    return share


def verify_decay(
    op: DiscreteOperator,
    landscape: Landscape,
    eigenpair: tuple[float, np.ndarray],
    mu_bar: float,
    delta: float,
    alpha: float = 0.5,
    partition: WellPartition | None = None,
    ell: int | None = None,
    slack: float = 2.0,
    stencil: str = "axis",
) -> CheckReport:
    """Exponential decay of an eigenpair away from the wells.

    With h the Agmon distance (shift mu_bar) to E(mu_bar + delta) (minus the
    complement of well ell's neighborhood for localized pairs), checks

        sum_{h_i >= 1} e^{2 alpha h_i} (edge_share_i + v_bar phi_i^2 M_ii)
            <= coef(alpha) * ||phi||_M^2 * slack.

    Hypotheses delta <= v_bar/10 and mu_bar + delta <= v_bar are required;
    violations produce a skipped report.  An eigenvalue above mu_bar is noted
    but still evaluated (the check is then empirical rather than guaranteed).
    The params record the energy-form variant: with chi = min(h, 1) and
    q = chi e^{alpha h} phi,

        sum_e c u_i u_j (q_i/u_i - q_j/u_j)^2
          + (1 - alpha^2) sum_i max(W_i - mu, 0) q_i^2 M_ii
            <= (1 + 2 alpha) e^{2 alpha} (v_bar - mu) sum_{0 < h_i < 1} phi_i^2 M_ii.
    """
    _require_fresh(landscape)
    mu, phi = eigenpair
    phi = np.asarray(phi, dtype=np.float64).ravel()
    v_bar = op.v_bar
    notes = []
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    hyp_ok = delta > 0.0 and delta <= v_bar / 10.0 and mu_bar + delta <= v_bar and mu_bar > 0.0
    params = {
        "mu": float(mu), "mu_bar": float(mu_bar), "delta": float(delta),
        "alpha": float(alpha), "v_bar": float(v_bar),
    }
    if not hyp_ok:
        return CheckReport(
            name="decay_bound", lhs=math.nan, rhs=math.nan, slack=slack,
            passed=True, skipped=True, notes="HypothesisViolated", params=params,
        )
    if mu > mu_bar:
        notes.append("eigenvalue_above_mu_bar")

    weight = agmon_weight(landscape, mu_bar)
    E = sublevel_set(landscape, mu_bar + delta)
    if partition is not None and ell is not None:
        keep = np.zeros(op.dof, dtype=bool)
        keep[partition.omegas[ell]] = True
        sources = E[keep[E]]
        params["well"] = int(ell)
    else:
        sources = E
    hfield = distance_to_set(weight, sources, stencil)
    h = hfield.h

    share = _edge_energy_share(op, phi)
    density = share + v_bar * phi * phi * op.M
    far = h >= 1.0
    with np.errstate(over="ignore"):
        grow = np.exp(2.0 * alpha * np.where(far, h, 0.0))
    lhs_terms = np.where(far, grow * density, 0.0)
    lhs = float(lhs_terms.sum())
    mass = op.mass_norm_sq(phi)
    coef = decay_coefficient(v_bar, delta, alpha)
    rhs = coef * mass

    # energy-form variant at the pair's own eigenvalue
    chi = np.minimum(h, 1.0)
    with np.errstate(over="ignore"):
        q = chi * np.exp(alpha * np.minimum(h, 700.0 / alpha)) * phi
    u = landscape.u
    ei, ej, _, c = op.edges
    qq = q / u
    energy_lhs = float(np.dot(c * u[ei] * u[ej], (qq[ei] - qq[ej]) ** 2))
    energy_lhs += (1.0 - alpha**2) * float(
        np.dot(np.maximum(landscape.W - mu, 0.0) * q * q, op.M)
    )
    ring = (h > 0.0) & (h < 1.0)
    ring_mass = float(np.dot(phi[ring] ** 2, op.M[ring]))
    energy_rhs = (1.0 + 2.0 * alpha) * math.exp(2.0 * alpha) * (v_bar - mu) * ring_mass

    params.update(
        coefficient=coef,
        mass=mass,
        far_nodes=int(far.sum()),
        source_nodes=int(np.asarray(sources).size),
        energy_lhs=energy_lhs,
        energy_rhs=energy_rhs,
        energy_passed=bool(energy_lhs <= energy_rhs * slack),
        ring_mass=ring_mass,
    )
    return CheckReport(
        name="decay_bound",
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        passed=bool(lhs <= rhs * slack),
        notes=";".join(notes),
        params=params,
    )


def cutoff_residual_bound(
    op: DiscreteOperator,
    landscape: Landscape,
    eigenpair: tuple[float, np.ndarray],
    partition: WellPartition,
    ell: int,
    slack: float = 2.0,
) -> CheckReport:
    """Dual-norm bound on the residual of the cutoff eigenfunction.

    eta ramps from 1 (within Agmon distance S1/2 - 1 of cluster ell) to 0
    (beyond S1/2) with unit slope in between, S1 = S_bar.  The residual
    r = K(eta phi) - mu M(eta phi) is measured in the dual norm
    r^T (K_lap + v_bar M)^(-1) r and compared against
    18 e^2 (v_bar/delta) exp(-S1/2) * v_bar * ||phi||_M^2.
    """
    _require_fresh(landscape)
    mu, phi = eigenpair
    phi = np.asarray(phi, dtype=np.float64).ravel()
    v_bar = op.v_bar
    delta = partition.delta
    S1 = partition.S_bar
    params = {"mu": float(mu), "well": int(ell), "S1": float(S1), "delta": float(delta)}
    if not np.isfinite(S1):
        return CheckReport(
            name="cutoff_residual", lhs=math.nan, rhs=math.nan, slack=slack,
            passed=True, skipped=True, notes="single cluster: separation is infinite",
            params=params,
        )
    rho = partition.rho_fields[ell]
    eta = np.clip(S1 / 2.0 - rho, 0.0, 1.0)
    fe = eta * phi
    r = op.K @ fe - mu * (op.M * fe)
    G = (op.K + sp.diags((v_bar - op.V) * op.M)).tocsc()
    z = spla.splu(G).solve(r)
    lhs = float(np.dot(r, z))
    eps = 18.0 * math.e**2 * (v_bar / delta) * math.exp(-S1 / 2.0)
    rhs = eps * v_bar * op.mass_norm_sq(phi)
    params.update(eps=eps)
    return CheckReport(
        name="cutoff_residual",
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        passed=bool(lhs <= rhs * slack),
        params=params,
    )


def projection_coefficient(v_bar: float, delta: float, S_bar: float) -> float:
    """300 (v_bar/delta)^3 exp(-S_bar/2); zero when S_bar is infinite."""
    if not np.isfinite(S_bar):
        return 0.0
    return 300.0 * (v_bar / delta) ** 3 * math.exp(-S_bar / 2.0)


def verify_projection(
    op: DiscreteOperator,
    global_set: EigenSet,
    localized_set: LocalizedEigenSet,
    mu_bar: float,
    delta: float,
    slack: float = 2.0,
) -> list[CheckReport]:
    """Closeness of global and localized spectra below mu_bar - delta.

    For each global pair (lam, psi) with lam <= mu_bar - delta the residual
    of psi off the span of localized pairs with value in (lam - delta,
    lam + delta) must satisfy the projection bound; symmetrically for each
    localized pair against the global set.  A check is vacuous when the bound
    exceeds the trivial bound ||psi||_M^2.  A tiny absolute floor (1e-18 per
    unit mass) keeps the degenerate S_bar = inf case (bound exactly 0) from
    failing on roundoff.
    """
    S_bar = localized_set.partition.S_bar
    coef = projection_coefficient(op.v_bar, delta, S_bar)
    reports: list[CheckReport] = []

    loc_vals = localized_set.all_values
    loc_vecs = [localized_set.vector_full(l, j) for l, j, _ in localized_set.pairs]
    for i, lam in enumerate(global_set.values):
        if lam > mu_bar - delta:
            continue
        psi = global_set.vectors[:, i]
        mass = op.mass_norm_sq(psi)
        _, resid, used = spectral_project(op, psi, loc_vals, loc_vecs, (lam - delta, lam + delta))
        rhs = coef * mass
        reports.append(
            CheckReport(
                name=f"projection_global_{i}",
                lhs=resid,
                rhs=rhs,
                slack=slack,
                passed=bool(resid <= rhs * slack + PROJECTION_FLOOR * mass),
                vacuous=bool(rhs >= mass),
                params={"lambda": float(lam), "window_pairs": used, "mass": mass,
                        "coefficient": coef, "S_bar": float(S_bar)},
            )
        )
    glob_vecs = global_set.vectors
    for l, j, muv in localized_set.pairs:
        if muv > mu_bar - delta:
            continue
        phi = localized_set.vector_full(l, j)
        mass = op.mass_norm_sq(phi)
        _, resid, used = spectral_project(
            op, phi, global_set.values, glob_vecs, (muv - delta, muv + delta)
        )
        rhs = coef * mass
        reports.append(
            CheckReport(
                name=f"projection_local_{l}_{j}",
                lhs=resid,
                rhs=rhs,
                slack=slack,
                passed=bool(resid <= rhs * slack + PROJECTION_FLOOR * mass),
                vacuous=bool(rhs >= mass),
                params={"mu": float(muv), "window_pairs": used, "mass": mass,
                        "coefficient": coef, "S_bar": float(S_bar)},
            )
        )
    return reports


def counting_capacity(v_bar: float, delta: float, S_bar: float, cap: int = 10**15) -> int:
    """Largest N with 300 N (v_bar/delta)^3 < exp(S_bar/2), capped."""
    if not np.isfinite(S_bar):
        return cap
    log_limit = S_bar / 2.0 - math.log(300.0) - 3.0 * math.log(v_bar / delta)
    if log_limit <= 0.0:
        return 0
    if log_limit >= math.log(cap):
        return cap
    n = int(math.floor(math.exp(log_limit)))
    while n > 0 and not (math.log(300.0 * n) + 3.0 * math.log(v_bar / delta) < S_bar / 2.0):
        n -= 1
    return n


def verify_counting(
    global_values,
    localized_values,
    mu_bar: float,
    delta: float,
    v_bar: float,
    S_bar: float,
) -> CheckReport:
    """Two-sided eigenvalue counting up to the capacity N_cap.

    With N (global) and N0 (localized) the counting functions, sweeps mu over
    midpoints between consecutive spectral values <= mu_bar and checks

        min(N_cap, N0(mu - delta)) <= N(mu)   and
        min(N_cap, N(mu - delta)) <= N0(mu).

    The empirical two-sided interlacing N0(lam - delta) <= N(lam) <=
    N0(lam + delta) at each global value lam <= mu_bar is recorded in params
    (informational, not part of pass/fail).
    """
    N = counting(global_values)
    N0 = counting(localized_values)
    n_cap = counting_capacity(v_bar, delta, S_bar)
    merged = np.unique(np.concatenate([N.values, N0.values]))
    merged = merged[merged <= mu_bar]
    sweep = []
    if merged.size:
        sweep.append(float(merged[0] - delta / 2.0))
        sweep.extend(((merged[:-1] + merged[1:]) / 2.0).tolist())
        sweep.append(float(min(merged[-1] + delta / 2.0, mu_bar)))
    sweep = [s for s in sweep if s <= mu_bar]
    failures = []
    for mu in sweep:
        lower_ok = min(n_cap, N0(mu - delta)) <= N(mu)
        upper_ok = min(n_cap, N(mu - delta)) <= N0(mu)
        if not (lower_ok and upper_ok):
            failures.append(mu)
    inter_total = inter_ok = 0
    for lam in N.values:
        if lam > mu_bar:
            continue
        inter_total += 1
        if N0(lam - delta) <= N(lam) <= N0(lam + delta):
            inter_ok += 1
    passed = not failures
    return CheckReport(
        name="counting",
        lhs=float(len(failures)),
        rhs=0.0,
        slack=1.0,
        passed=passed,
        notes="lhs = number of sweep points violating the two-sided count",
        params={
            "capacity": n_cap,
            "sweep_points": len(sweep),
            "failures": failures[:10],
            "interlacing_checked": inter_total,
            "interlacing_ok": inter_ok,
            "mu_bar": float(mu_bar),
            "delta": float(delta),
            "S_bar": float(S_bar),
        },
    )


def verify_landscape_floor(landscape: Landscape, atol: float = 1e-10) -> CheckReport:
    """u > 0 and min(u) >= 1/v_bar - atol."""
    u = landscape.u
    v_bar = landscape.op.v_bar
    floor = 1.0 / v_bar if v_bar > 0 else 0.0
    umin = float(u.min())
    passed = umin > 0.0 and umin >= floor - atol
    notes = "pass iff rhs = min(u) clears lhs = 1/v_bar - atol and is positive"
    if umin <= 0.0:
        notes = "NonpositiveLandscape; " + notes
    return CheckReport(
        name="landscape_floor",
        lhs=floor - atol,
        rhs=umin,
        slack=1.0,
        passed=passed,
        notes=notes,
        params={"v_bar": float(v_bar), "min_u": umin, "atol": atol},
    )
