"""Deterministic stream derivation for replicated experiments.

Every stochastic operation takes a seed and derives its generator from a
counter-based bit generator (Philox) keyed on the full seed path.  A
replicate's stream depends only on ``(master_seed, *path)``, never on
execution order, so serial and worker-pool runs agree bit for bit.
"""

from __future__ import annotations

from typing import Union

import numpy as np

Seed = Union[int, tuple]

_MASK64 = (1 << 64) - 1


def seed_path(seed: Seed, *path: int) -> tuple:
    """Normalise ``seed`` plus extra path components into an entropy tuple."""
    base = seed if isinstance(seed, tuple) else (seed,)
    return tuple(int(x) & _MASK64 for x in (*base, *path))


def derive_stream(seed: Seed, *path: int) -> np.random.Generator:
    """Return an independent generator for ``(seed, *path)``."""
    entropy = seed_path(seed, *path)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
