"""Seeded random substreams.

All randomness goes through numpy's ``SeedSequence`` -> ``PCG64`` pipeline.
A substream is addressed by ``(seed, *key)`` so that the draws made for one
unit of work (a tree, a CV cell, a seed row) never depend on how many other
units ran before it or on which worker ran them.
"""

import numpy as np


def substream(seed: int, *key: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *key: int) -> int:
    """Integer seed for a child computation keyed by ``key``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
