"""Particle swarm optimization with archive-guided swarm dispersion.

The package bundles four complete optimizers (gpso, lpso, dmspso, dsdpso), a
suite of twelve scalable benchmark objectives, swarm diversity metrics, and a
deterministic experiment harness with CSV and figure reporting.
"""
from .dispersion import (
    DispersionConfig,
    ExternalArchive,
    build_roulette,
    disperse,
    dispersion_due,
    generate_candidates,
    init_archive,
    mating_pool_evolve,
    select_relocation_indices,
    select_targets,
    steady_update,
    warmup_update,
)
from .diversity import center, euclidean_distance, position_diversity
from .errors import ConfigError
from .harness import (
    ExperimentSpec,
    StatRow,
    aggregate_stats,
    compute_stats,
    emit_results,
    load_config,
    rank_sum_pvalue,
    run_experiment,
)
from .objectives import (
    FUNCTION_IDS,
    ObjectiveProblem,
    evaluate,
    evaluate_many,
    make_problem,
    rotation_matrix,
)
from .optimizers import (
    ALGORITHMS,
    OptimizerConfig,
    RunRecord,
    run_config,
    run_dmspso,
    run_dsdpso,
    run_gpso,
    run_lpso,
)
from .swarm import (
    InertiaSchedule,
    Particle,
    Swarm,
    dispersed_velocity_update,
    inertia_at,
    init_swarm,
    neighborhood_best,
    standard_velocity_update,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "ConfigError",
    "DispersionConfig",
    "ExperimentSpec",
    "ExternalArchive",
    "FUNCTION_IDS",
    "InertiaSchedule",
    "ObjectiveProblem",
    "OptimizerConfig",
    "Particle",
    "RunRecord",
    "StatRow",
    "Swarm",
    "aggregate_stats",
    "build_roulette",
    "center",
    "compute_stats",
    "disperse",
    "dispersed_velocity_update",
    "dispersion_due",
    "emit_results",
    "euclidean_distance",
    "evaluate",
    "evaluate_many",
    "generate_candidates",
    "inertia_at",
    "init_archive",
    "init_swarm",
    "load_config",
    "make_problem",
    "mating_pool_evolve",
    "neighborhood_best",
    "position_diversity",
    "rank_sum_pvalue",
    "rotation_matrix",
    "run_config",
    "run_dmspso",
    "run_dsdpso",
    "run_experiment",
    "run_gpso",
    "run_lpso",
    "select_relocation_indices",
    "select_targets",
    "standard_velocity_update",
    "steady_update",
    "step",
    "warmup_update",
    "__version__",
]
