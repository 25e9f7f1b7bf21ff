"""External archive upkeep and the dispersion event.

The archive is a fixed-size population of promising points.  During the
warm-up window it absorbs each generation's swarm best whenever that beats
the worst stored entry; afterwards only marked improvements are stored, and
they displace the entry closest to the archive mean so the archive keeps its
spread.  A dispersion event synthesizes relocation targets from the archive
(dimension-wise roulette donation followed by one generation of crossover and
mutation over candidates plus archive) and teleports a chosen subset of the
swarm onto them.  Relocated particles keep their personal-best memory.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import ConfigError
from .objectives import ObjectiveProblem, evaluate_many
from .swarm import DISPERSED_MODES, Swarm

RELOCATION_POLICIES = ("low_fitness", "idle", "hybrid")
INITIAL_VELOCITIES = ("zero", "random", "previous")

# Iterations during which the archive absorbs every generation's swarm best.
WARMUP_ITERS = 100


@dataclass
class DispersionConfig:
    """Knobs of the dispersion mechanism; None fields resolve against the run config."""

    period: int = 30                      # iterations between dispersion events
    rate: float = 0.45                    # fraction of the swarm relocated per event
    archive_capacity: int = 100
    policy: str = "hybrid"                # low_fitness | idle | hybrid
    initial_velocity: str = "zero"        # zero | random | previous
    post_regime: str = "eq4"              # velocity rule inside the post-dispersion window
    candidate_count: int = 100
    improvement_delta: float = 0.01       # relative gbest improvement that counts as remarkable
    idle_threshold: int | None = None     # defaults to period
    weight_alpha: float = 0.5             # rank blend: alpha fitness, (1 - alpha) distance
    crossover_prob: float = 0.9
    mutation_prob: float | None = None    # per gene; defaults to 1/dim
    mutation_sigma_frac: float = 0.1      # mutation step as a fraction of the search range

    def validate(self) -> None:
        if self.period < 1:
            raise ConfigError(f"period must be >= 1, got {self.period}")
        if not 0.0 < self.rate <= 1.0:
            raise ConfigError(f"rate must lie in (0, 1], got {self.rate}")
        if self.archive_capacity < 2:
            raise ConfigError(f"archive capacity must be >= 2, got {self.archive_capacity}")
        if self.policy not in RELOCATION_POLICIES:
            raise ConfigError(f"unknown relocation policy {self.policy!r}")
        if self.initial_velocity not in INITIAL_VELOCITIES:
            raise ConfigError(f"unknown initial velocity mode {self.initial_velocity!r}")
        if self.post_regime not in DISPERSED_MODES:
            raise ConfigError(f"unknown post-dispersion regime {self.post_regime!r}")
        if self.candidate_count < 1:
            raise ConfigError(f"candidate count must be >= 1, got {self.candidate_count}")
        if self.improvement_delta < 0:
            raise ConfigError(f"improvement delta must be >= 0, got {self.improvement_delta}")
        if self.idle_threshold is not None and self.idle_threshold < 1:
            raise ConfigError(f"idle threshold must be >= 1, got {self.idle_threshold}")
        if not 0.0 <= self.weight_alpha <= 1.0:
            raise ConfigError(f"weight alpha must lie in [0, 1], got {self.weight_alpha}")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ConfigError(f"crossover probability must lie in [0, 1], got {self.crossover_prob}")
        if self.mutation_prob is not None and not 0.0 <= self.mutation_prob <= 1.0:
            raise ConfigError(f"mutation probability must lie in [0, 1], got {self.mutation_prob}")
        if self.mutation_sigma_frac < 0:
            raise ConfigError(f"mutation sigma fraction must be >= 0, got {self.mutation_sigma_frac}")


@dataclass
class ExternalArchive:
    """Fixed-cardinality store of evaluated in-bounds positions.

    The two bound corners (all-upper and all-lower vectors) are kept alongside
    with their own fitness; they join the donor roulette but are never replaced.
    """

    positions: np.ndarray       # (capacity, dim)
    fitnesses: np.ndarray       # (capacity,)
    lower: np.ndarray
    upper: np.ndarray
    corner_fitnesses: np.ndarray  # (2,) fitness of the all-upper and all-lower vectors

    @property
    def capacity(self) -> int:
        return self.fitnesses.shape[0]

    @property
    def problem_dim(self) -> int:
        return self.positions.shape[1]


def init_archive(problem: ObjectiveProblem, capacity: int, rng: np.random.Generator) -> ExternalArchive:
    """Archive of random evaluated in-bounds points; the bound corners are scored once here."""
    if capacity < 2:
        raise ValueError(f"archive capacity must be >= 2, got {capacity}")
    positions = rng.uniform(problem.lower, problem.upper, size=(capacity, problem.dim))
    fitnesses = evaluate_many(problem, positions)
    corners = np.stack([problem.upper, problem.lower])
    return ExternalArchive(
        positions=positions,
        fitnesses=fitnesses,
        lower=problem.lower.copy(),
        upper=problem.upper.copy(),
        corner_fitnesses=evaluate_many(problem, corners),
    )


def warmup_update(archive: ExternalArchive, gbest_pos: np.ndarray, gbest_fit: float,
                  iteration: int) -> ExternalArchive:
    """Early-phase insertion: the swarm best replaces the worst entry whenever it beats it."""
    if iteration >= WARMUP_ITERS:
        raise ValueError(f"warm-up updates only apply before iteration {WARMUP_ITERS}, got {iteration}")
    worst = int(np.argmax(archive.fitnesses))
    if gbest_fit < archive.fitnesses[worst]:
        archive.positions[worst] = gbest_pos
        archive.fitnesses[worst] = gbest_fit
    return archive


def steady_update(archive: ExternalArchive, old_gbest_fit: float, new_gbest_pos: np.ndarray,
                  new_gbest_fit: float, improvement_delta: float = 0.01) -> ExternalArchive:
    """Post-warm-up insertion, gated on a remarkable relative improvement.

    A stored improvement displaces the entry closest to the archive mean, which
    preserves the archive's outer spread.
    """
    if abs(new_gbest_fit - old_gbest_fit) <= improvement_delta * max(abs(old_gbest_fit), 1e-12):
        return archive
    mean = archive.positions.mean(axis=0)
    distances = np.linalg.norm(archive.positions - mean, axis=1)
    nearest = int(np.argmin(distances))
    archive.positions[nearest] = new_gbest_pos
    archive.fitnesses[nearest] = new_gbest_fit
    return archive


def _donor_matrix(archive: ExternalArchive) -> np.ndarray:
    # archive entries followed by the two bound corners, in roulette order
    return np.vstack([archive.positions, archive.upper[None, :], archive.lower[None, :]])


def _rank_scores(fitnesses: np.ndarray, positions: np.ndarray, swarm_center: np.ndarray,
                 alpha: float) -> np.ndarray:
    """Convex blend of two rank criteria: lower fitness and larger distance from the swarm center.

    Midranks keep tied entries at equal score; every score is strictly positive.
    """
    k = fitnesses.shape[0]
    fit_score = (k + 1 - rankdata(fitnesses)) / k
    distances = np.linalg.norm(positions - swarm_center, axis=1)
    dist_score = rankdata(distances) / k
    return alpha * fit_score + (1.0 - alpha) * dist_score


def build_roulette(archive: ExternalArchive, swarm_center: np.ndarray, alpha: float = 0.5) -> np.ndarray:
    """Donor selection weights over archive entries plus the two bound corners; sums to one."""
    donors = _donor_matrix(archive)
    fitnesses = np.concatenate([archive.fitnesses, archive.corner_fitnesses])
    scores = _rank_scores(fitnesses, donors, np.asarray(swarm_center, dtype=float), alpha)
    return scores / scores.sum()


def generate_candidates(archive: ExternalArchive, swarm_center: np.ndarray, count: int,
                        rng: np.random.Generator, alpha: float = 0.5) -> np.ndarray:
    """Candidates built coordinate by coordinate, each gene copied from a roulette-picked donor."""
    if count < 1:
        raise ValueError(f"candidate count must be >= 1, got {count}")
    donors = _donor_matrix(archive)
    weights = build_roulette(archive, swarm_center, alpha)
    picks = rng.choice(donors.shape[0], size=(count, archive.problem_dim), p=weights)
    return np.take_along_axis(donors, picks, axis=0)


def mating_pool_evolve(candidates: np.ndarray, archive: ExternalArchive, problem: ObjectiveProblem,
                       rng: np.random.Generator, crossover_prob: float = 0.9,
                       mutation_prob: float | None = None,
                       mutation_sigma_frac: float = 0.1) -> tuple[np.ndarray, np.ndarray]:
    """One generation over the pool of candidates plus archive entries.

    The shuffled pool is paired off; each pair undergoes uniform crossover with
    the given probability, then every offspring gene mutates independently by
    bounded Gaussian noise.  Returns the evaluated pool followed by the
    evaluated offspring as (positions, fitnesses); archive fitness is reused
    rather than re-spent.
    """
    pool = np.vstack([candidates, archive.positions])
    p, dim = pool.shape
    gene_prob = (1.0 / problem.dim) if mutation_prob is None else mutation_prob

    perm = rng.permutation(p)
    parents = pool[perm]
    half = p // 2
    a = parents[0 : 2 * half : 2]
    b = parents[1 : 2 * half : 2]
    crossed = rng.random(half) < crossover_prob
    swap = crossed[:, None] & (rng.random((half, dim)) < 0.5)
    offspring = np.empty_like(parents)
    offspring[0 : 2 * half : 2] = np.where(swap, b, a)
    offspring[1 : 2 * half : 2] = np.where(swap, a, b)
    if p % 2:
        offspring[-1] = parents[-1]

    mutate = rng.random((p, dim)) < gene_prob
    sigma = mutation_sigma_frac * (problem.upper - problem.lower)
    offspring = offspring + mutate * (sigma * rng.standard_normal((p, dim)))
    offspring = np.clip(offspring, problem.lower, problem.upper)

    candidate_fit = evaluate_many(problem, candidates)
    offspring_fit = evaluate_many(problem, offspring)
    positions = np.vstack([candidates, archive.positions, offspring])
    fitnesses = np.concatenate([candidate_fit, archive.fitnesses, offspring_fit])
    return positions, fitnesses


def select_targets(positions: np.ndarray, fitnesses: np.ndarray, k: int, swarm_center: np.ndarray,
                   alpha: float = 0.5) -> np.ndarray:
    """Top-k pool points under the same rank blend the roulette uses, best score first."""
    if k > fitnesses.shape[0]:
        raise ValueError(f"cannot select {k} targets from a pool of {fitnesses.shape[0]}")
    scores = _rank_scores(fitnesses, positions, np.asarray(swarm_center, dtype=float), alpha)
    order = np.argsort(-scores, kind="stable")
    return positions[order[:k]].copy()


def select_relocation_indices(swarm: Swarm, policy: str, k: int, idle_threshold: int) -> list[int]:
    """Which particles to relocate; at least one particle always stays in place."""
    m = swarm.size
    if not 1 <= k < m:
        raise ValueError(f"relocation count must satisfy 1 <= k < {m}, got {k}")
    fit = swarm.fitness
    if policy == "low_fitness":
        order = np.argsort(-fit, kind="stable")
        return [int(i) for i in order[:k]]
    if policy == "idle":
        # most idle first, ties broken by worse current fitness
        order = np.lexsort((-fit, -swarm.idle_count))
        return [int(i) for i in order[:k]]
    if policy == "hybrid":
        idle_mask = swarm.idle_count >= idle_threshold
        idle_idx = np.flatnonzero(idle_mask)
        chosen = [int(i) for i in idle_idx[np.argsort(-fit[idle_idx], kind="stable")][:k]]
        if len(chosen) < k:
            rest = np.flatnonzero(~idle_mask)
            filler = rest[np.argsort(-fit[rest], kind="stable")]
            chosen.extend(int(i) for i in filler[: k - len(chosen)])
        return chosen
    raise ConfigError(f"unknown relocation policy {policy!r}")


def disperse(swarm: Swarm, problem: ObjectiveProblem, targets: np.ndarray, indices: list[int],
             cfg: DispersionConfig, rng: np.random.Generator) -> Swarm:
    """Teleport the chosen particles onto the shuffled targets.

    Personal bests and the swarm best survive untouched; relocated particles
    get fresh fitness, a cleared idle counter, and a damped-search window of
    one period.
    """
    idx = np.asarray(indices, dtype=int)
    if idx.shape[0] != np.unique(idx).shape[0]:
        raise ValueError("duplicate relocation indices")
    if targets.shape[0] != idx.shape[0]:
        raise ValueError(f"got {targets.shape[0]} targets for {idx.shape[0]} particles")
    placed = targets[rng.permutation(targets.shape[0])]
    swarm.positions[idx] = placed
    if cfg.initial_velocity == "zero":
        swarm.velocities[idx] = 0.0
    elif cfg.initial_velocity == "random":
        span = problem.span
        swarm.velocities[idx] = rng.uniform(-span, span, size=placed.shape)
    elif cfg.initial_velocity != "previous":
        raise ConfigError(f"unknown initial velocity mode {cfg.initial_velocity!r}")
    swarm.fitness[idx] = evaluate_many(problem, placed)
    swarm.idle_count[idx] = 0
    swarm.dispersed_until[idx] = swarm.iteration + cfg.period
    return swarm


def dispersion_due(iteration: int, period: int) -> bool:
    """True on every period-th iteration after the start."""
    return iteration > 0 and iteration % period == 0
