"""Diversity and distance oracles, invariances, and naive-reference equivalence."""
import numpy as np
import pytest

from dsdpso.diversity import center, euclidean_distance, position_diversity


def naive_diversity(positions) -> float:
    """Double-loop reference: per-dimension mean absolute deviation, averaged over dimensions."""
    m = len(positions)
    n = len(positions[0])
    total = 0.0
    for j in range(n):
        mean_j = sum(positions[i][j] for i in range(m)) / m
        total += sum(abs(positions[i][j] - mean_j) for i in range(m)) / m
    return total / n


def test_identical_population_has_zero_diversity():
    # dyadic coordinate so the mean is exact; 3.7 would leave ~1e-16 residue
    assert position_diversity(np.ones((6, 4)) * 3.5) == 0.0


def test_two_point_hand_value():
    # mean (1,1); every deviation has magnitude 1
    assert position_diversity([[0.0, 0.0], [2.0, 2.0]]) == 1.0


def test_three_point_one_dimensional_hand_value():
    assert position_diversity([[0.0], [1.0], [2.0]]) == pytest.approx(2.0 / 3.0, rel=1e-15)


def test_single_particle_population():
    assert position_diversity([[5.0, -2.0]]) == 0.0


def test_matches_naive_reference_on_random_populations():
    rng = np.random.default_rng(123)
    for _ in range(300):
        m = int(rng.integers(1, 11))
        n = int(rng.integers(1, 6))
        pop = rng.uniform(-50.0, 50.0, size=(m, n))
        got = position_diversity(pop)
        want = naive_diversity(pop.tolist())
        assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_translation_invariance():
    rng = np.random.default_rng(7)
    pop = rng.normal(size=(8, 3))
    shift = rng.normal(size=3) * 100.0
    assert position_diversity(pop + shift) == pytest.approx(position_diversity(pop), rel=1e-12)


def test_scale_equivariance():
    rng = np.random.default_rng(8)
    pop = rng.normal(size=(5, 4))
    for a in (2.0, -3.5, 0.0):
        assert position_diversity(a * pop) == pytest.approx(
            abs(a) * position_diversity(pop), rel=1e-12, abs=1e-15
        )


def test_rejects_empty_or_ragged_input():
    with pytest.raises(ValueError):
        position_diversity(np.empty((0, 3)))
    with pytest.raises(ValueError):
        position_diversity([[1.0, 2.0], [3.0]])


def test_euclidean_distance_values():
    assert euclidean_distance([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert euclidean_distance([0.0, 0.0], [3.0, 4.0]) == 5.0
    assert euclidean_distance(np.ones(3), np.full(3, 2.0)) == pytest.approx(np.sqrt(3.0), rel=1e-12)


def test_euclidean_distance_is_symmetric_and_triangular():
    rng = np.random.default_rng(9)
    for _ in range(100):
        x, y, z = rng.normal(size=(3, 4))
        assert euclidean_distance(x, y) == euclidean_distance(y, x)
        assert euclidean_distance(x, z) <= euclidean_distance(x, y) + euclidean_distance(y, z) + 1e-12


def test_euclidean_distance_rejects_length_mismatch():
    with pytest.raises(ValueError):
        euclidean_distance([1.0, 2.0], [1.0, 2.0, 3.0])


def test_center_values():
    assert np.array_equal(center([[4.0, -1.0]]), np.array([4.0, -1.0]))
    assert np.array_equal(center([[0.0, 0.0], [2.0, 2.0]]), np.array([1.0, 1.0]))
    got = center([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    assert got == pytest.approx(np.zeros(2), abs=1e-15)


def test_center_rejects_empty():
    with pytest.raises(ValueError):
        center(np.empty((0, 2)))
