"""Population spread measures used for monitoring runs and steering dispersion."""
from __future__ import annotations

import numpy as np


def _as_population(positions) -> np.ndarray:
    x = np.asarray(positions, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError("positions must be a non-empty 2-d array of equal-length vectors")
    return x


def position_diversity(positions) -> float:
    """Dimension-wise mean absolute deviation from the population mean, averaged over dimensions.

    Zero exactly when all positions coincide.
    """
    x = _as_population(positions)
    return float(np.abs(x - x.mean(axis=0)).mean())


def euclidean_distance(x, y) -> float:
    """Plain L2 distance between two equal-length vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    return float(np.sqrt(np.sum((x - y) ** 2)))


def center(positions) -> np.ndarray:
    """Per-dimension arithmetic mean of the population."""
    return _as_population(positions).mean(axis=0)
