"""Swarm state and one synchronous iteration of particle swarm optimization.

Two velocity rules live here.  The standard rule combines inertia with
cognitive and social pulls weighted by fresh per-dimension uniforms.  The
dispersed rule is the damped variant applied to freshly relocated particles:
minimum inertia, and the whole sum shrunk by a single random factor drawn
once per particle per iteration.  Velocities are clamped to the full search
range per dimension; positions are clamped into bounds, and any clamped
component has its velocity zeroed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .objectives import ObjectiveProblem, evaluate_many

# Improvements at or below this do not count for idle bookkeeping (pbest still updates).
PBEST_IMPROVE_TOL = 1e-12

# Velocity rules selectable for particles inside their post-dispersion window.
DISPERSED_MODES = ("eq1", "eq1_low_inertia", "eq4")

TOPOLOGIES = ("star", "ring")


@dataclass
class InertiaSchedule:
    """Linear inertia anneal from w_start at iteration 0 to w_end at max_iter."""

    max_iter: int
    w_start: float = 0.9
    w_end: float = 0.4


def inertia_at(schedule: InertiaSchedule, iteration: int) -> float:
    """Inertia weight at an iteration; clamped to w_end past the schedule's end."""
    if iteration < 0:
        raise ValueError(f"iteration must be >= 0, got {iteration}")
    if iteration >= schedule.max_iter:
        return schedule.w_end
    frac = iteration / schedule.max_iter
    return schedule.w_start + (schedule.w_end - schedule.w_start) * frac


@dataclass
class Particle:
    """View of one swarm slot; array fields alias the swarm's storage."""

    position: np.ndarray
    velocity: np.ndarray
    fitness: float
    pbest_pos: np.ndarray
    pbest_fit: float
    idle_count: int
    dispersed_until: int


@dataclass
class Swarm:
    positions: np.ndarray        # (m, dim)
    velocities: np.ndarray       # (m, dim)
    fitness: np.ndarray          # (m,)
    pbest_pos: np.ndarray        # (m, dim)
    pbest_fit: np.ndarray        # (m,)
    idle_count: np.ndarray       # (m,) iterations since the last counted pbest improvement
    dispersed_until: np.ndarray  # (m,) first iteration back on the standard rule
    iteration: int
    gbest_pos: np.ndarray
    gbest_fit: float
    topology: str = "star"

    @property
    def size(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    def particle(self, i: int) -> Particle:
        return Particle(
            position=self.positions[i],
            velocity=self.velocities[i],
            fitness=float(self.fitness[i]),
            pbest_pos=self.pbest_pos[i],
            pbest_fit=float(self.pbest_fit[i]),
            idle_count=int(self.idle_count[i]),
            dispersed_until=int(self.dispersed_until[i]),
        )


def init_swarm(problem: ObjectiveProblem, m: int, rng: np.random.Generator, topology: str = "star") -> Swarm:
    """Uniform random swarm: positions inside bounds, velocities inside the signed search range."""
    if m < 2:
        raise ValueError(f"swarm size must be >= 2, got {m}")
    if topology not in TOPOLOGIES:
        raise ValueError(f"unknown topology {topology!r}")
    span = problem.span
    positions = rng.uniform(problem.lower, problem.upper, size=(m, problem.dim))
    velocities = rng.uniform(-span, span, size=(m, problem.dim))
    fitness = evaluate_many(problem, positions)
    best = int(np.argmin(fitness))
    return Swarm(
        positions=positions,
        velocities=velocities,
        fitness=fitness,
        pbest_pos=positions.copy(),
        pbest_fit=fitness.copy(),
        idle_count=np.zeros(m, dtype=int),
        dispersed_until=np.zeros(m, dtype=int),
        iteration=0,
        gbest_pos=positions[best].copy(),
        gbest_fit=float(fitness[best]),
        topology=topology,
    )


def _pull(velocity, position, pbest_pos, nbest_pos, w, c1, c2, r1, r2):
    return w * velocity + c1 * r1 * (pbest_pos - position) + c2 * r2 * (nbest_pos - position)


def _clamp_move(position, velocity, lower, upper):
    # velocity capped at the full per-dimension range; clamped position components kill their velocity
    span = upper - lower
    velocity = np.clip(velocity, -span, span)
    moved = position + velocity
    clamped = np.clip(moved, lower, upper)
    velocity = np.where(moved == clamped, velocity, 0.0)
    return velocity, clamped


def standard_velocity_update(position, velocity, pbest_pos, nbest_pos, w, c1, c2, lower, upper,
                             rng: np.random.Generator):
    """Standard move: inertia plus cognitive and social pulls with per-dimension uniforms.

    Returns (new velocity, new position) after clamping.
    """
    position = np.asarray(position, dtype=float)
    r1 = rng.random(position.shape)
    r2 = rng.random(position.shape)
    v = _pull(velocity, position, pbest_pos, nbest_pos, w, c1, c2, r1, r2)
    return _clamp_move(position, v, lower, upper)


def dispersed_velocity_update(position, velocity, pbest_pos, nbest_pos, w_min, c1, c2, lower, upper,
                              rng: np.random.Generator):
    """Damped move for relocated particles: minimum inertia, whole sum shrunk by one random factor.

    The shrink factor is drawn first, before the per-dimension uniforms, once per call.
    """
    position = np.asarray(position, dtype=float)
    r0 = rng.random()
    r1 = rng.random(position.shape)
    r2 = rng.random(position.shape)
    v = r0 * _pull(velocity, position, pbest_pos, nbest_pos, w_min, c1, c2, r1, r2)
    return _clamp_move(position, v, lower, upper)


def neighborhood_best(swarm: Swarm, i: int) -> np.ndarray:
    """Social attractor for particle i: the global best (star) or the best pbest among ring neighbours."""
    if swarm.topology == "star":
        return swarm.gbest_pos
    m = swarm.size
    idx = np.array([(i - 1) % m, i, (i + 1) % m])
    return swarm.pbest_pos[idx[np.argmin(swarm.pbest_fit[idx])]]


def _ring_best_all(swarm: Swarm) -> np.ndarray:
    # stacked in (i-1, i, i+1) order so argmin tie-breaking matches neighborhood_best
    stacked = np.stack([np.roll(swarm.pbest_fit, 1), swarm.pbest_fit, np.roll(swarm.pbest_fit, -1)])
    choice = np.argmin(stacked, axis=0)
    neighbours = (np.arange(swarm.size) + choice - 1) % swarm.size
    return swarm.pbest_pos[neighbours]


def step(swarm: Swarm, problem: ObjectiveProblem, schedule: InertiaSchedule, c1: float, c2: float,
         rng: np.random.Generator, nbest_override: np.ndarray | None = None,
         dispersed_mode: str = "eq4") -> Swarm:
    """Advance the swarm one iteration: move every particle, evaluate, update records.

    All particles move synchronously against the records from the iteration
    start.  Particles still inside their post-dispersion window follow the
    rule named by dispersed_mode; everyone else follows the standard rule.
    The randoms (one shrink factor per particle, then the two per-dimension
    uniform blocks) are drawn for the whole swarm every iteration, so stream
    consumption never depends on which particles are dispersed.
    """
    if dispersed_mode not in DISPERSED_MODES:
        raise ValueError(f"unknown dispersed mode {dispersed_mode!r}")
    m, dim = swarm.positions.shape
    w = inertia_at(schedule, swarm.iteration)

    if nbest_override is not None:
        nbest = nbest_override
    elif swarm.topology == "star":
        nbest = np.broadcast_to(swarm.gbest_pos, (m, dim))
    else:
        nbest = _ring_best_all(swarm)

    r0 = rng.random(m)
    r1 = rng.random((m, dim))
    r2 = rng.random((m, dim))

    v_new = _pull(swarm.velocities, swarm.positions, swarm.pbest_pos, nbest, w, c1, c2, r1, r2)
    dispersed = swarm.iteration < swarm.dispersed_until
    if dispersed.any() and dispersed_mode != "eq1":
        v_low = _pull(swarm.velocities, swarm.positions, swarm.pbest_pos, nbest,
                      schedule.w_end, c1, c2, r1, r2)
        if dispersed_mode == "eq4":
            v_low = r0[:, None] * v_low
        v_new = np.where(dispersed[:, None], v_low, v_new)

    v_new, x_new = _clamp_move(swarm.positions, v_new, problem.lower, problem.upper)
    fitness = evaluate_many(problem, x_new)

    improved = fitness < swarm.pbest_fit
    counted = (swarm.pbest_fit - fitness) > PBEST_IMPROVE_TOL
    swarm.positions = x_new
    swarm.velocities = v_new
    swarm.fitness = fitness
    swarm.pbest_pos[improved] = x_new[improved]
    swarm.pbest_fit = np.where(improved, fitness, swarm.pbest_fit)
    swarm.idle_count = np.where(counted, 0, swarm.idle_count + 1)

    best = int(np.argmin(swarm.pbest_fit))
    if swarm.pbest_fit[best] < swarm.gbest_fit:
        swarm.gbest_fit = float(swarm.pbest_fit[best])
        swarm.gbest_pos = swarm.pbest_pos[best].copy()

    swarm.iteration += 1
    return swarm
