"""Deterministic RNG derivation so every experiment is replayable."""

from __future__ import annotations

import numpy as np


def child_rng(seed: int, *path: int) -> np.random.Generator:
    """Derive an independent generator from a root seed and an integer path.

    The same (seed, path) always yields the same stream, so trials, recursion
    branches, and parallel runs can each own a stream without coordination.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, *path))))
