"""Deterministic derivation of the independent random streams used by a run.

Every run owns one integer seed.  The seed fans out into named substreams so
that consumers which must not interfere with each other (swarm initialization,
particle dynamics, objective noise, dispersion machinery) never share a
generator.  Two algorithms given the same seed therefore draw identical
initial populations, and optional machinery (the external archive) can draw
randomness without perturbing the trajectory of the core swarm.
"""
from __future__ import annotations

import numpy as np

# spawn-key tags for the substreams hanging off one run seed
NOISE = 1        # objective-internal noise (stochastic benchmark functions)
INIT = 2         # initial positions and velocities
DYNAMICS = 3     # per-iteration velocity randomness, regrouping
DISPERSION = 4   # archive seeding, candidate generation, genetic operators


def substream(seed: int, tag: int) -> np.random.Generator:
    """Generator for one named stream; the same (seed, tag) always yields the same stream."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(tag,)))


def run_seed(master_seed: int, run_index: int) -> int:
    """Per-run seed derived from (master_seed, run_index) only.

    Independence from the algorithm under test is what makes paired runs
    start from identical populations.
    """
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(run_index,))
    return int(ss.generate_state(1, np.uint64)[0])
