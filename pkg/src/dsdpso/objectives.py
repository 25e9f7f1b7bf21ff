"""Scalable benchmark objectives: twelve classic minimization problems.

All functions have optimum value 0.  Most attain it at the origin; Rosenbrock
at the all-ones point and the sine-modulated Schwefel function near
420.9687 in every coordinate.  Two functions are stochastic (their noise is
drawn from a per-problem seeded stream) and two are evaluated in rotated
coordinates z = x @ M with a seeded random orthogonal M.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError
from .rng import NOISE, substream


def _sphere(x: np.ndarray) -> np.ndarray:
    # sum x_i^2
    return np.sum(x * x, axis=1)


def _schwefel_1_2(x: np.ndarray) -> np.ndarray:
    # sum_i (sum_{j<=i} x_j)^2
    c = np.cumsum(x, axis=1)
    return np.sum(c * c, axis=1)


def _quartic(x: np.ndarray) -> np.ndarray:
    # sum (i+1) x_i^4 for i = 0..n-1; the additive uniform noise lives in the evaluator
    w = np.arange(1, x.shape[1] + 1, dtype=float)
    return np.sum(w * x**4, axis=1)


def _rosenbrock(x: np.ndarray) -> np.ndarray:
    # sum 100 (x_{i+1} - x_i^2)^2 + (x_i - 1)^2
    a = x[:, 1:] - x[:, :-1] ** 2
    b = x[:, :-1] - 1.0
    return np.sum(100.0 * a * a + b * b, axis=1)


def _schwefel(x: np.ndarray) -> np.ndarray:
    # 418.9829 n - sum x_i sin(sqrt|x_i|)
    return 418.9829 * x.shape[1] - np.sum(x * np.sin(np.sqrt(np.abs(x))), axis=1)


def _rastrigin(x: np.ndarray) -> np.ndarray:
    # sum x_i^2 - 10 cos(2 pi x_i) + 10
    return np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x) + 10.0, axis=1)


def _round_half_away(t: np.ndarray) -> np.ndarray:
    # round to nearest integer, halves away from zero (np.round would round halves to even)
    return np.copysign(np.floor(np.abs(t) + 0.5), t)


def _noncontinuous_rastrigin(x: np.ndarray) -> np.ndarray:
    # y_i = x_i where |x_i| < 1/2, otherwise round(2 x_i)/2; then Rastrigin on y
    y = np.where(np.abs(x) < 0.5, x, _round_half_away(2.0 * x) / 2.0)
    return _rastrigin(y)


def _schaffer(x: np.ndarray) -> np.ndarray:
    # (sum x^2)^(1/4) [sin^2(50 (sum x^2)^(1/10)) + 1]
    s = np.sum(x * x, axis=1)
    return s**0.25 * (np.sin(50.0 * s**0.1) ** 2 + 1.0)


def _griewank(x: np.ndarray) -> np.ndarray:
    # 1 + sum x^2 / 4000 - prod cos(x_i / sqrt(i+1)), i = 0..n-1
    d = np.sqrt(np.arange(1, x.shape[1] + 1, dtype=float))
    return 1.0 + np.sum(x * x, axis=1) / 4000.0 - np.prod(np.cos(x / d), axis=1)


def _ackley(x: np.ndarray) -> np.ndarray:
    n = x.shape[1]
    return (
        20.0
        + np.e
        - 20.0 * np.exp(-0.2 * np.sqrt(np.sum(x * x, axis=1) / n))
        - np.exp(np.sum(np.cos(2.0 * np.pi * x), axis=1) / n)
    )


@dataclass(frozen=True)
class _FunctionSpec:
    name: str
    interval: tuple[float, float]
    fn: Callable[[np.ndarray], np.ndarray]
    rotated: bool = False
    noisy: bool = False


_FUNCTIONS: dict[str, _FunctionSpec] = {
    "f1": _FunctionSpec("sphere", (-100.0, 100.0), _sphere),
    "f2": _FunctionSpec("schwefel-1.2", (-100.0, 100.0), _schwefel_1_2),
    "f3": _FunctionSpec("noisy-schwefel-1.2", (-100.0, 100.0), _schwefel_1_2, noisy=True),
    "f4": _FunctionSpec("noisy-quartic", (-1.28, 1.28), _quartic, noisy=True),
    "f5": _FunctionSpec("rosenbrock", (-30.0, 30.0), _rosenbrock),
    "f6": _FunctionSpec("schwefel", (-500.0, 500.0), _schwefel),
    "f7": _FunctionSpec("rastrigin", (-5.12, 5.12), _rastrigin),
    "f8": _FunctionSpec("noncontinuous-rastrigin", (-5.12, 5.12), _noncontinuous_rastrigin),
    "f9": _FunctionSpec("schaffer", (-32.767, 32.767), _schaffer),
    "f10": _FunctionSpec("griewank", (-600.0, 600.0), _griewank),
    "f11": _FunctionSpec("rotated-ackley", (-32.0, 32.0), _ackley, rotated=True),
    "f12": _FunctionSpec("rotated-rastrigin", (-5.12, 5.12), _rastrigin, rotated=True),
}

FUNCTION_IDS: tuple[str, ...] = tuple(_FUNCTIONS)


@dataclass
class ObjectiveProblem:
    """One instantiated objective: bounds, optional rotation/noise state, eval counter."""

    id: str
    dim: int
    lower: np.ndarray
    upper: np.ndarray
    rotation: np.ndarray | None = None
    noise_rng: np.random.Generator | None = None
    eval_count: int = 0

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower


def rotation_matrix(dim: int, seed: int) -> np.ndarray:
    """Seeded random orthogonal matrix; identical bits for identical (dim, seed).

    Orthogonalizes a square Gaussian matrix.  The sign of each column is fixed
    by the factorization's diagonal so the result is unique.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def make_problem(function_id: str, dim: int, seed: int) -> ObjectiveProblem:
    """Instantiate a benchmark function at a given dimension with seeded internals."""
    if function_id not in _FUNCTIONS:
        raise ConfigError(f"unknown function id {function_id!r}; expected one of {', '.join(FUNCTION_IDS)}")
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    spec = _FUNCTIONS[function_id]
    lo, hi = spec.interval
    return ObjectiveProblem(
        id=function_id,
        dim=dim,
        lower=np.full(dim, lo),
        upper=np.full(dim, hi),
        rotation=rotation_matrix(dim, seed) if spec.rotated else None,
        noise_rng=substream(seed, NOISE) if spec.noisy else None,
    )


def evaluate(problem: ObjectiveProblem, x: np.ndarray) -> float:
    """Fitness of a single point.  Counts one evaluation; out-of-bounds points are allowed."""
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.dim,):
        raise ValueError(f"point has shape {x.shape}, problem dimension is {problem.dim}")
    return float(evaluate_many(problem, x[None, :])[0])


def evaluate_many(problem: ObjectiveProblem, xs: np.ndarray) -> np.ndarray:
    """Fitness of a batch of points, one eval count and one noise draw per row."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != problem.dim:
        raise ValueError(f"batch has shape {xs.shape}, expected (n, {problem.dim})")
    if np.isnan(xs).any():
        raise ValueError("NaN in evaluation point")
    n = xs.shape[0]
    z = xs @ problem.rotation if problem.rotation is not None else xs
    spec = _FUNCTIONS[problem.id]
    values = spec.fn(z)
    if problem.id == "f3":
        values = values * (1.0 + 0.4 * np.abs(problem.noise_rng.standard_normal(n)))
    elif problem.id == "f4":
        values = values + problem.noise_rng.random(n)
    problem.eval_count += n
    return values


def known_minimizer(problem: ObjectiveProblem) -> np.ndarray:
    """Location of the known optimum (for the stochastic functions: of the noise-free part)."""
    if problem.id == "f5":
        return np.ones(problem.dim)
    if problem.id == "f6":
        return np.full(problem.dim, 420.9687)
    return np.zeros(problem.dim)


def describe_functions() -> list[tuple[str, str, tuple[float, float], float]]:
    """Rows of (id, name, search interval, optimum value) for every benchmark function."""
    return [(fid, s.name, s.interval, 0.0) for fid, s in _FUNCTIONS.items()]
