"""Landscape-function localization toolkit.

Discrete second-order operators on tori and boxes, their landscape function
u (solving K u = M 1) and effective potential W = 1/u, Agmon distances in
the metric induced by W, well partitions of sublevel sets, global and
well-localized eigenpairs, and numerical verification of the decay,
approximation, and counting bounds that W controls.
"""

from .agmon import (
    AgmonWeight,
    DistanceField,
    agmon_weight,
    build_cost_graph,
    distance_to_set,
    pairwise_separation,
)
from .config import ConfigError, RunConfig, load_config, parse_config
from .eigensolve import (
    CountingFunction,
    EigenSet,
    LocalizedEigenSet,
    counting,
    eig_localized,
    eig_smallest,
    refine_eigenpairs,
    spectral_project,
)
from .ensemble import (
    EnsembleSummary,
    RealizationRecord,
    aggregate,
    gen_bernoulli_2d,
    gen_constant,
    gen_uniform_1d,
    per_size_stats,
    run_ensemble,
    run_realization,
)
from .errors import EigenwellsError
from .grid import GridSpec, build_grid
from .landscape import Landscape, effective_potential, solve_landscape
from .operators import (
    CoefficientField,
    DiscreteOperator,
    assemble,
    load_coefficients_csv,
    make_coefficient_field,
    quadratic_form,
    restrict,
    save_coefficients_csv,
)
from .rng import PRNG_ID, SplitMix64
from .verify import (
    CheckReport,
    counting_capacity,
    cutoff_residual_bound,
    decay_coefficient,
    projection_coefficient,
    verify_counting,
    verify_decay,
    verify_eigen_identity,
    verify_form_bound,
    verify_identity,
    verify_landscape_floor,
    verify_projection,
)
from .wells import WellPartition, build_partition, components, sublevel_set

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AgmonWeight",
    "CheckReport",
    "CoefficientField",
    "ConfigError",
    "CountingFunction",
    "DiscreteOperator",
    "DistanceField",
    "EigenSet",
    "EigenwellsError",
    "EnsembleSummary",
    "GridSpec",
    "Landscape",
    "LocalizedEigenSet",
    "PRNG_ID",
    "RealizationRecord",
    "RunConfig",
    "SplitMix64",
    "WellPartition",
    "aggregate",
    "per_size_stats",
    "agmon_weight",
    "assemble",
    "build_cost_graph",
    "build_grid",
    "build_partition",
    "components",
    "counting",
    "counting_capacity",
    "cutoff_residual_bound",
    "decay_coefficient",
    "distance_to_set",
    "effective_potential",
    "eig_localized",
    "eig_smallest",
    "gen_bernoulli_2d",
    "gen_constant",
    "gen_uniform_1d",
    "load_coefficients_csv",
    "load_config",
    "make_coefficient_field",
    "pairwise_separation",
    "parse_config",
    "projection_coefficient",
    "quadratic_form",
    "refine_eigenpairs",
    "restrict",
    "run_ensemble",
    "run_realization",
    "save_coefficients_csv",
    "solve_landscape",
    "spectral_project",
    "sublevel_set",
    "verify_counting",
    "verify_decay",
    "verify_eigen_identity",
    "verify_form_bound",
    "verify_identity",
    "verify_landscape_floor",
    "verify_projection",
]
