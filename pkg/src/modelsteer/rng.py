"""Deterministic random streams.

All stochastic choices in the engine draw from Philox (a 64-bit
counter-based generator) through named, purpose-keyed streams derived
from the model seed. Streams for different purposes, or for different
trees, never overlap, so per-tree work can run in any order (or in
parallel) without changing results.

Stream derivation order is part of the training contract:

    SPLIT      train/holdout partition
    BOOTSTRAP  per-tree stream (seed, BOOTSTRAP, tree_index):
               bootstrap indices first, then per-node feature subsets
               in depth-first node order (left before right)
    EXPLAIN    explanation row sample, then background sample
    OVERSAMPLE minority-class oversampling during correction
"""

from __future__ import annotations

import numpy as np

SPLIT = 0
BOOTSTRAP = 1
EXPLAIN = 2
OVERSAMPLE = 3


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return the Philox stream for (seed, *path)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.Philox(ss))
