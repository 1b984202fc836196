"""Deterministic seed derivation for pipeline stages.

Every randomized stage derives its generator from (root seed, stage tags),
so results do not depend on execution order or parallel scheduling.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _tag_to_int(tag) -> int:
    if isinstance(tag, (int, np.integer)):
        return int(tag) & 0xFFFFFFFFFFFFFFFF
    digest = hashlib.sha256(str(tag).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def child_seed_seq(root_seed: int, *tags) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(root_seed), *(_tag_to_int(t) for t in tags)])


def child_rng(root_seed: int, *tags) -> np.random.Generator:
    return np.random.default_rng(child_seed_seq(root_seed, *tags))
