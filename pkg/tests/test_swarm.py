"""Swarm mechanics: velocity rule oracles, clamping, topologies, and step invariants."""
import numpy as np
import pytest

from dsdpso.objectives import make_problem
from dsdpso.rng import INIT, substream
from dsdpso.swarm import (
    PBEST_IMPROVE_TOL,
    InertiaSchedule,
    Swarm,
    dispersed_velocity_update,
    inertia_at,
    init_swarm,
    neighborhood_best,
    standard_velocity_update,
    step,
)


class QueuedRng:
    """Stand-in generator: .random() pops the next queued value; arrays are filled with it."""

    def __init__(self, values):
        self.values = list(values)

    def random(self, size=None):
        v = self.values.pop(0)
        if size is None:
            return v
        return np.full(size, v)


BOUNDS = (np.array([-100.0]), np.array([100.0]))


def test_inertia_schedule_endpoints_and_midpoint():
    schedule = InertiaSchedule(max_iter=3000)
    assert inertia_at(schedule, 0) == 0.9
    assert inertia_at(schedule, 1500) == pytest.approx(0.65, rel=1e-15)
    assert inertia_at(schedule, 3000) == 0.4
    assert inertia_at(schedule, 5000) == 0.4  # clamped past the end
    with pytest.raises(ValueError):
        inertia_at(schedule, -1)


def test_standard_update_scalar_oracle():
    # w*v = 1, cognitive pull 0.75*4 = 3, social pull 1.0*1 = 1, so v' = 5
    v, x = standard_velocity_update(
        np.array([0.0]), np.array([2.0]), np.array([4.0]), np.array([1.0]),
        0.5, 1.0, 1.0, *BOUNDS, QueuedRng([0.75, 1.0]),
    )
    assert v[0] == pytest.approx(5.0, abs=1e-15)
    assert x[0] == pytest.approx(5.0, abs=1e-15)


def test_standard_update_fixed_point():
    pos = np.array([3.0, -4.0])
    v, x = standard_velocity_update(
        pos, np.zeros(2), pos, pos, 0.7, 2.0, 2.0,
        np.full(2, -100.0), np.full(2, 100.0), np.random.default_rng(0),
    )
    assert np.array_equal(v, np.zeros(2))
    assert np.array_equal(x, pos)


def test_standard_update_inertia_only():
    v, x = standard_velocity_update(
        np.array([1.0]), np.array([7.0]), np.array([50.0]), np.array([-50.0]),
        1.0, 2.0, 2.0, *BOUNDS, QueuedRng([0.0, 0.0]),
    )
    assert v[0] == 7.0
    assert x[0] == 8.0


def test_dispersed_update_scalar_oracle():
    # r0 = 0.5 shrinks (0.4*1 + 0.5*4 + 1.0*2) = 4.4 to 2.2
    v, x = dispersed_velocity_update(
        np.array([0.0]), np.array([1.0]), np.array([4.0]), np.array([2.0]),
        0.4, 1.0, 1.0, *BOUNDS, QueuedRng([0.5, 0.5, 1.0]),
    )
    assert v[0] == pytest.approx(2.2, abs=1e-15)
    assert x[0] == pytest.approx(2.2, abs=1e-15)


def test_dispersed_update_zero_coefficient_freezes_particle():
    v, x = dispersed_velocity_update(
        np.array([5.0]), np.array([9.0]), np.array([-4.0]), np.array([2.0]),
        0.4, 2.0, 2.0, *BOUNDS, QueuedRng([0.0, 0.3, 0.7]),
    )
    assert v[0] == 0.0
    assert x[0] == 5.0


def test_dispersed_update_with_unit_coefficient_matches_standard():
    args = (np.array([1.0]), np.array([2.0]), np.array([4.0]), np.array([-3.0]))
    v_d, x_d = dispersed_velocity_update(*args, 0.4, 2.0, 2.0, *BOUNDS, QueuedRng([1.0, 0.3, 0.7]))
    v_s, x_s = standard_velocity_update(*args, 0.4, 2.0, 2.0, *BOUNDS, QueuedRng([0.3, 0.7]))
    assert np.array_equal(v_d, v_s)
    assert np.array_equal(x_d, x_s)


def test_dispersed_update_contracts_at_equilibrium():
    # with pbest = nbest = x only the damped inertia term survives
    rng = np.random.default_rng(42)
    pos = np.array([10.0, -20.0])
    vel = np.array([8.0, -3.0])
    for _ in range(50):
        v, _ = dispersed_velocity_update(
            pos, vel, pos, pos, 0.4, 2.0, 2.0,
            np.full(2, -100.0), np.full(2, 100.0), rng,
        )
        assert np.all(np.abs(v) <= 0.4 * np.abs(vel) + 1e-15)


def test_velocity_clamped_to_search_range():
    v, x = standard_velocity_update(
        np.array([0.0]), np.array([500.0]), np.array([0.0]), np.array([0.0]),
        1.0, 2.0, 2.0, *BOUNDS, QueuedRng([0.0, 0.0]),
    )
    # velocity capped at the 200-wide range, position clamped at the bound, velocity then zeroed
    assert x[0] == 100.0
    assert v[0] == 0.0


def test_interior_move_keeps_velocity():
    v, x = standard_velocity_update(
        np.array([0.0]), np.array([50.0]), np.array([0.0]), np.array([0.0]),
        1.0, 2.0, 2.0, *BOUNDS, QueuedRng([0.0, 0.0]),
    )
    assert x[0] == 50.0
    assert v[0] == 50.0


def _fresh_swarm(m=6, dim=3, seed=0, topology="star", function="f1"):
    problem = make_problem(function, dim, seed)
    return problem, init_swarm(problem, m, substream(seed, INIT), topology=topology)


def test_init_swarm_state():
    problem, swarm = _fresh_swarm(m=20, dim=30)
    assert swarm.size == 20 and swarm.dim == 30
    assert np.all(swarm.positions >= problem.lower) and np.all(swarm.positions <= problem.upper)
    assert np.all(np.abs(swarm.velocities) <= problem.span)
    assert np.array_equal(swarm.pbest_pos, swarm.positions)
    assert np.array_equal(swarm.pbest_fit, swarm.fitness)
    assert swarm.gbest_fit == swarm.fitness.min()
    assert np.all(swarm.idle_count == 0)
    assert swarm.iteration == 0


def test_init_swarm_is_deterministic():
    _, a = _fresh_swarm(seed=5)
    _, b = _fresh_swarm(seed=5)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.velocities, b.velocities)


def test_init_swarm_rejects_bad_inputs():
    problem = make_problem("f1", 2, 0)
    with pytest.raises(ValueError):
        init_swarm(problem, 1, np.random.default_rng(0))
    with pytest.raises(ValueError):
        init_swarm(problem, 4, np.random.default_rng(0), topology="mesh")


def test_neighborhood_best_star_returns_global_best():
    _, swarm = _fresh_swarm(m=5)
    assert np.array_equal(neighborhood_best(swarm, 3), swarm.gbest_pos)


def test_neighborhood_best_ring_excludes_distant_best():
    _, swarm = _fresh_swarm(m=5, topology="ring")
    swarm.pbest_fit = np.array([0.0, 5.0, 4.0, 3.0, 2.0])
    # neighborhood of particle 2 is {1, 2, 3}; the global best at index 0 is out of reach
    assert np.array_equal(neighborhood_best(swarm, 2), swarm.pbest_pos[3])


def test_neighborhood_best_degenerate_ring_equals_star():
    _, swarm = _fresh_swarm(m=3, topology="ring")
    best = int(np.argmin(swarm.pbest_fit))
    for i in range(3):
        assert np.array_equal(neighborhood_best(swarm, i), swarm.pbest_pos[best])


def test_step_invariants_over_a_run():
    problem, swarm = _fresh_swarm(m=8, dim=4, seed=3, function="f7")
    schedule = InertiaSchedule(max_iter=60)
    rng = np.random.default_rng(99)
    previous_gbest = swarm.gbest_fit
    for _ in range(60):
        old_pbest = swarm.pbest_fit.copy()
        old_idle = swarm.idle_count.copy()
        step(swarm, problem, schedule, 2.0, 2.0, rng)
        assert np.all(swarm.positions >= problem.lower)
        assert np.all(swarm.positions <= problem.upper)
        assert np.all(swarm.pbest_fit <= swarm.fitness + 1e-15)
        assert swarm.gbest_fit <= previous_gbest
        counted = (old_pbest - swarm.pbest_fit) > PBEST_IMPROVE_TOL
        assert np.array_equal(swarm.idle_count, np.where(counted, 0, old_idle + 1))
        previous_gbest = swarm.gbest_fit
    assert swarm.iteration == 60


def test_step_is_deterministic():
    def curve(seed):
        problem, swarm = _fresh_swarm(m=6, dim=3, seed=seed)
        schedule = InertiaSchedule(max_iter=40)
        rng = np.random.default_rng(1234)
        out = []
        for _ in range(40):
            step(swarm, problem, schedule, 2.0, 2.0, rng)
            out.append(swarm.gbest_fit)
        return np.array(out), swarm.positions

    curve_a, pos_a = curve(7)
    curve_b, pos_b = curve(7)
    assert np.array_equal(curve_a, curve_b)
    assert np.array_equal(pos_a, pos_b)


def _cloned(swarm: Swarm) -> Swarm:
    return Swarm(
        positions=swarm.positions.copy(), velocities=swarm.velocities.copy(),
        fitness=swarm.fitness.copy(), pbest_pos=swarm.pbest_pos.copy(),
        pbest_fit=swarm.pbest_fit.copy(), idle_count=swarm.idle_count.copy(),
        dispersed_until=swarm.dispersed_until.copy(), iteration=swarm.iteration,
        gbest_pos=swarm.gbest_pos.copy(), gbest_fit=swarm.gbest_fit, topology=swarm.topology,
    )


def test_dispersed_window_does_not_disturb_other_particles():
    problem, swarm = _fresh_swarm(m=6, dim=3, seed=11)
    plain = _cloned(swarm)
    windowed = _cloned(swarm)
    windowed.dispersed_until[0] = 10
    schedule = InertiaSchedule(max_iter=50)
    step(plain, problem, schedule, 2.0, 2.0, np.random.default_rng(5))
    step(windowed, problem, schedule, 2.0, 2.0, np.random.default_rng(5))
    assert not np.array_equal(windowed.positions[0], plain.positions[0])
    assert np.array_equal(windowed.positions[1:], plain.positions[1:])


def test_eq1_mode_ignores_the_window():
    problem, swarm = _fresh_swarm(m=5, dim=2, seed=13)
    plain = _cloned(swarm)
    windowed = _cloned(swarm)
    windowed.dispersed_until[2] = 99
    schedule = InertiaSchedule(max_iter=50)
    step(plain, problem, schedule, 2.0, 2.0, np.random.default_rng(8), dispersed_mode="eq1")
    step(windowed, problem, schedule, 2.0, 2.0, np.random.default_rng(8), dispersed_mode="eq1")
    assert np.array_equal(windowed.positions, plain.positions)


def test_dispersed_modes_differ_only_on_windowed_particles():
    problem, swarm = _fresh_swarm(m=5, dim=2, seed=17)
    results = {}
    for mode in ("eq1", "eq1_low_inertia", "eq4"):
        clone = _cloned(swarm)
        clone.dispersed_until[0] = 99
        step(clone, problem, InertiaSchedule(max_iter=50), 2.0, 2.0,
             np.random.default_rng(21), dispersed_mode=mode)
        results[mode] = clone.positions.copy()
    assert np.array_equal(results["eq1"][1:], results["eq4"][1:])
    assert np.array_equal(results["eq1"][1:], results["eq1_low_inertia"][1:])
    assert not np.array_equal(results["eq1"][0], results["eq4"][0])
    assert not np.array_equal(results["eq1_low_inertia"][0], results["eq4"][0])


def test_step_rejects_unknown_mode():
    problem, swarm = _fresh_swarm()
    with pytest.raises(ValueError):
        step(swarm, problem, InertiaSchedule(max_iter=10), 2.0, 2.0,
             np.random.default_rng(0), dispersed_mode="eq9")
