"""Replica-symmetric solution of the diluted random K-sat model.

Exact finite-size free energy by enumeration, the cavity fixed point by
population dynamics, Monte Carlo evaluation of the replica-symmetric
functional, and empirical verifiers for the parameter regions where the
two provably agree in the large-size limit.
"""

__version__ = "0.1.0"

from .cavity import (
    INIT_PRESETS,
    FixedPointResult,
    Population,
    cavity_map,
    load_population,
    make_population,
    population_step,
    save_population,
    solve_fixed_point,
)
from .exact import (
    CapError,
    Instance,
    OverlapMoments,
    free_energy,
    gibbs_moments,
    log_partition,
    overlap_moment_gap,
    sample_instance,
)
from .metrics import DistanceResult, Summary, summarize, wasserstein_1d
from .model import (
    Estimate,
    ModelParams,
    rng_stream,
    sample_clause_signs,
    sample_poisson,
    theta_batch,
    theta_eval,
)
from .regions import (
    ContractionResult,
    LipschitzResult,
    RegionReport,
    contraction_test,
    inclusion_scan,
    lipschitz_test,
    region_check,
)
from .rs import RsBreakdown, rs_eval

__all__ = [
    "__version__",
    "CapError",
    "ContractionResult",
    "DistanceResult",
    "Estimate",
    "FixedPointResult",
    "INIT_PRESETS",
    "Instance",
    "LipschitzResult",
    "ModelParams",
    "OverlapMoments",
    "Population",
    "RegionReport",
    "RsBreakdown",
    "Summary",
    "cavity_map",
    "contraction_test",
    "free_energy",
    "gibbs_moments",
    "inclusion_scan",
    "lipschitz_test",
    "load_population",
    "log_partition",
    "make_population",
    "overlap_moment_gap",
    "population_step",
    "region_check",
    "rng_stream",
    "rs_eval",
    "sample_clause_signs",
    "sample_instance",
    "sample_poisson",
    "save_population",
    "solve_fixed_point",
    "summarize",
    "theta_batch",
    "theta_eval",
    "wasserstein_1d",
]
