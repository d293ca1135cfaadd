"""Deterministic RNG sub-streams derived from one root seed.

Every source of randomness in the package pulls from a named stream so
components (data generation, adapter init, attacks, shuffling) can be
re-seeded independently while staying reproducible across platforms.
"""

import hashlib

import numpy as np

STREAMS = ("data", "init", "attack", "shuffle")


def stream_seed(root_seed: int, name: str) -> int:
    """Stable 64-bit seed for a named sub-stream of ``root_seed``."""
    digest = hashlib.sha256(f"{root_seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def substream(root_seed: int, name: str) -> np.random.Generator:
    """PCG64 generator for a named sub-stream."""
    return np.random.default_rng(stream_seed(root_seed, name))
