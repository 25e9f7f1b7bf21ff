"""Complete optimizer drivers: four algorithms sharing one iteration engine.

gpso    global-best PSO (star topology)
lpso    local-best PSO (ring of three)
dmspso  dynamic multi-swarm PSO: small random sub-swarms, reshuffled periodically
dsdpso  gpso plus an external archive and periodic swarm dispersion

Paired runs are comparable by construction: the initial population depends
only on the seed, never on the algorithm, and dsdpso draws all dispersion
randomness from its own stream so with the dispersion period pushed past the
iteration budget it reproduces gpso exactly.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np

from .dispersion import (
    WARMUP_ITERS,
    DispersionConfig,
    ExternalArchive,
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
from .diversity import center, position_diversity
from .errors import ConfigError
from .objectives import FUNCTION_IDS, make_problem
from .rng import DISPERSION, DYNAMICS, INIT, substream
from .swarm import InertiaSchedule, Swarm, init_swarm, step

ALGORITHMS = ("gpso", "lpso", "dmspso", "dsdpso")


@dataclass
class OptimizerConfig:
    """Everything one run needs; unset dispersion sub-fields resolve to their defaults."""

    algo: str
    function: str
    dim: int
    m: int = 20
    max_iter: int = 3000
    c1: float = 2.0
    c2: float = 2.0
    w_start: float = 0.9
    w_end: float = 0.4
    dispersion: DispersionConfig = field(default_factory=DispersionConfig)
    dms_group_size: int = 3
    dms_regroup_period: int = 5
    seed: int = 0

    def validate(self) -> None:
        if self.algo not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algo!r}; expected one of {', '.join(ALGORITHMS)}")
        if self.function not in FUNCTION_IDS:
            raise ConfigError(f"unknown function id {self.function!r}")
        if self.dim < 1:
            raise ConfigError(f"dim must be >= 1, got {self.dim}")
        if self.m < 2:
            raise ConfigError(f"population size must be >= 2, got {self.m}")
        if self.max_iter < 1:
            raise ConfigError(f"iteration budget must be >= 1, got {self.max_iter}")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        if self.algo == "dmspso":
            if self.dms_group_size < 2:
                raise ConfigError(f"sub-swarm size must be >= 2, got {self.dms_group_size}")
            if self.m % self.dms_group_size:
                raise ConfigError(
                    f"population {self.m} is not divisible by sub-swarm size {self.dms_group_size}"
                )
            if self.dms_regroup_period < 1:
                raise ConfigError(f"regroup period must be >= 1, got {self.dms_regroup_period}")
        if self.algo == "dsdpso":
            self.dispersion.validate()
            k = int(np.floor(self.dispersion.rate * self.m))
            if not 1 <= k < self.m:
                raise ConfigError(
                    f"dispersion rate {self.dispersion.rate} relocates {k} of {self.m} particles; "
                    f"at least one particle must move and at least one must stay"
                )


@dataclass
class RunRecord:
    """Outcome of one run: final best, per-iteration curves, bookkeeping echoes."""

    algo: str
    function: str
    dim: int
    final_best: float
    best_curve: np.ndarray        # swarm-best fitness after each iteration, non-increasing
    diversity_curve: np.ndarray   # position diversity after each iteration
    evals_used: int
    seed: int
    config: dict
    run_index: int = 0
    # one row per dispersion event: (iteration, diversity before, diversity after, relocated count)
    dispersion_events: list[tuple[int, float, float, int]] = field(default_factory=list)


def _resolved(cfg: OptimizerConfig) -> OptimizerConfig:
    d = cfg.dispersion
    d = replace(
        d,
        idle_threshold=d.period if d.idle_threshold is None else d.idle_threshold,
        mutation_prob=(1.0 / cfg.dim) if d.mutation_prob is None else d.mutation_prob,
    )
    return replace(cfg, dispersion=d)


def _random_partition(m: int, group_size: int, rng: np.random.Generator) -> np.ndarray:
    """Random disjoint cover of range(m) by equal-size groups; returns a group label per index."""
    labels = np.empty(m, dtype=int)
    labels[rng.permutation(m)] = np.arange(m) // group_size
    return labels


def _group_best(swarm: Swarm, labels: np.ndarray) -> np.ndarray:
    """Per-particle social attractor: the best personal best within the particle's group."""
    nbest = np.empty_like(swarm.positions)
    for g in range(int(labels.max()) + 1):
        members = np.flatnonzero(labels == g)
        best = members[int(np.argmin(swarm.pbest_fit[members]))]
        nbest[members] = swarm.pbest_pos[best]
    return nbest


def _run(cfg: OptimizerConfig,
         on_iteration: Callable[[Swarm, ExternalArchive | None], None] | None = None) -> RunRecord:
    cfg.validate()
    cfg = _resolved(cfg)
    problem = make_problem(cfg.function, cfg.dim, cfg.seed)
    init_rng = substream(cfg.seed, INIT)
    dyn_rng = substream(cfg.seed, DYNAMICS)
    topology = "ring" if cfg.algo == "lpso" else "star"
    swarm = init_swarm(problem, cfg.m, init_rng, topology=topology)
    schedule = InertiaSchedule(cfg.max_iter, cfg.w_start, cfg.w_end)

    best_curve = np.empty(cfg.max_iter)
    diversity_curve = np.empty(cfg.max_iter)
    events: list[tuple[int, float, float, int]] = []

    archive: ExternalArchive | None = None
    if cfg.algo == "dsdpso":
        disp_rng = substream(cfg.seed, DISPERSION)
        d = cfg.dispersion
        archive = init_archive(problem, d.archive_capacity, disp_rng)
        relocate_k = int(np.floor(d.rate * cfg.m))
    if cfg.algo == "dmspso":
        labels = _random_partition(cfg.m, cfg.dms_group_size, dyn_rng)

    for t in range(cfg.max_iter):
        if cfg.algo == "dmspso":
            if t > 0 and t % cfg.dms_regroup_period == 0:
                labels = _random_partition(cfg.m, cfg.dms_group_size, dyn_rng)
            step(swarm, problem, schedule, cfg.c1, cfg.c2, dyn_rng,
                 nbest_override=_group_best(swarm, labels))
        elif cfg.algo == "dsdpso":
            previous_best = swarm.gbest_fit
            step(swarm, problem, schedule, cfg.c1, cfg.c2, dyn_rng, dispersed_mode=d.post_regime)
            if t < WARMUP_ITERS:
                warmup_update(archive, swarm.gbest_pos, swarm.gbest_fit, t)
            elif swarm.gbest_fit < previous_best:
                steady_update(archive, previous_best, swarm.gbest_pos, swarm.gbest_fit,
                              d.improvement_delta)
            if dispersion_due(swarm.iteration, d.period):
                before = position_diversity(swarm.positions)
                swarm_center = center(swarm.positions)
                candidates = generate_candidates(archive, swarm_center, d.candidate_count,
                                                 disp_rng, d.weight_alpha)
                pool_pos, pool_fit = mating_pool_evolve(candidates, archive, problem, disp_rng,
                                                        d.crossover_prob, d.mutation_prob,
                                                        d.mutation_sigma_frac)
                targets = select_targets(pool_pos, pool_fit, relocate_k, swarm_center, d.weight_alpha)
                chosen = select_relocation_indices(swarm, d.policy, relocate_k, d.idle_threshold)
                disperse(swarm, problem, targets, chosen, d, disp_rng)
                events.append((swarm.iteration, before, position_diversity(swarm.positions),
                               len(chosen)))
        else:
            step(swarm, problem, schedule, cfg.c1, cfg.c2, dyn_rng)

        best_curve[t] = swarm.gbest_fit
        diversity_curve[t] = position_diversity(swarm.positions)
        if on_iteration is not None:
            on_iteration(swarm, archive)

    return RunRecord(
        algo=cfg.algo,
        function=cfg.function,
        dim=cfg.dim,
        final_best=float(swarm.gbest_fit),
        best_curve=best_curve,
        diversity_curve=diversity_curve,
        evals_used=problem.eval_count,
        seed=cfg.seed,
        config=asdict(cfg),
        dispersion_events=events,
    )


def _checked(cfg: OptimizerConfig, algo: str) -> OptimizerConfig:
    if cfg.algo != algo:
        raise ConfigError(f"config names algorithm {cfg.algo!r}, driver runs {algo!r}")
    return cfg


def run_gpso(cfg: OptimizerConfig) -> RunRecord:
    """Global-best PSO with the linear inertia anneal."""
    return _run(_checked(cfg, "gpso"))


def run_lpso(cfg: OptimizerConfig) -> RunRecord:
    """Local-best PSO on a ring: each particle follows the best of itself and its two neighbours."""
    return _run(_checked(cfg, "lpso"))


def run_dmspso(cfg: OptimizerConfig) -> RunRecord:
    """Dynamic multi-swarm PSO: random equal sub-swarms, reshuffled every regroup period."""
    return _run(_checked(cfg, "dmspso"))


def run_dsdpso(cfg: OptimizerConfig,
               on_iteration: Callable[[Swarm, ExternalArchive | None], None] | None = None) -> RunRecord:
    """Dispersion PSO: gpso plus archive upkeep every iteration and periodic dispersion events."""
    return _run(_checked(cfg, "dsdpso"), on_iteration=on_iteration)


def run_config(cfg: OptimizerConfig) -> RunRecord:
    """Dispatch on cfg.algo."""
    if cfg.algo not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {cfg.algo!r}")
    return _run(cfg)
