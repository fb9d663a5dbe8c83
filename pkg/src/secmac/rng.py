"""Reproducible random streams.

Every random draw in the toolkit comes from a counter-based generator
(Philox) keyed by a 64-bit master seed plus a tuple of purpose tags, so
results do not depend on call order or on how work is split across
workers.  String tags are hashed to stable 64-bit integers.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _tag_int(tag: int | str) -> int:
    if isinstance(tag, str):
        return int.from_bytes(hashlib.blake2s(tag.encode()).digest()[:8], "little")
    return int(tag) & 0xFFFFFFFFFFFFFFFF


def substream(seed: int | np.random.SeedSequence, *tags: int | str) -> np.random.SeedSequence:
    """Derive a child SeedSequence for (seed, *tags) without mutating state.

    Children are built from explicit spawn keys, so the same (seed, tags)
    always yields the same stream no matter how many other streams were
    derived before it.
    """
    if isinstance(seed, np.random.SeedSequence):
        entropy = seed.entropy
        base = tuple(seed.spawn_key)
    else:
        entropy = int(seed)
        base = ()
    return np.random.SeedSequence(entropy, spawn_key=base + tuple(_tag_int(t) for t in tags))


def stream(seed: int | np.random.SeedSequence, *tags: int | str) -> np.random.Generator:
    """Generator for the (seed, *tags) stream."""
    return np.random.Generator(np.random.Philox(substream(seed, *tags)))
