"""Keyed random substreams.

Every stream is a Philox generator seeded from ``SeedSequence(seed,
spawn_key=key)``, so the stream for a given key depends only on the master
seed and the key, never on how many other streams were drawn before it.
Monte Carlo loops use ``key = (replicate, slot)`` where slot 0 drives the
learning sample and slot ``l + 1`` drives the partition of tree ``l``.
"""

from __future__ import annotations

import numpy as np

SAMPLE_SLOT = 0


def substream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def tree_slot(tree_index: int) -> int:
    return tree_index + 1
