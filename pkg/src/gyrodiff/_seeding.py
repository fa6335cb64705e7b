"""Deterministic RNG stream derivation.

Every stochastic stage derives its generator from (master_seed, stage tag,
indices).  Streams are independent of scheduling/worker order because each
(tag, index) pair gets its own SeedSequence.
"""

import hashlib

import numpy as np

__all__ = ["derive_rng", "derive_seed_sequence"]


def _tag_to_int(tag) -> int:
    if isinstance(tag, (int, np.integer)):
        return int(tag) & 0xFFFFFFFF
    h = hashlib.sha256(str(tag).encode()).digest()
    return int.from_bytes(h[:4], "little")


def derive_seed_sequence(master_seed: int, *tags) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF]
                                  + [_tag_to_int(t) for t in tags])


def derive_rng(master_seed: int, *tags) -> np.random.Generator:
    return np.random.default_rng(derive_seed_sequence(master_seed, *tags))
