"""Seedable, splittable random generation.

Every stochastic operation in the library takes an explicit generator
handle.  Generators run on a counter-based bit stream (Philox), so child
streams spawned from one seed never collide and a given (seed, spawn
layout) replays bit-identically on any platform.
"""

from __future__ import annotations

import numpy as np

__all__ = ["make_rng", "spawn_rngs"]


def make_rng(seed):
    """Return a counter-based generator for ``seed``.

    ``seed`` may be an int, a ``SeedSequence``, or an existing
    ``Generator`` (returned unchanged so call sites can pass either).
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def spawn_rngs(seed, n):
    """Split ``seed`` into ``n`` independent generators."""
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(s)) for s in root.spawn(n)]
