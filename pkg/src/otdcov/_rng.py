"""Seeded random streams.

Every random draw in the package comes from a generator derived from
``(seed, purpose, *index)`` so that results do not depend on call order or
on how work is split across threads.
"""
import zlib

import numpy as np


def _tag(purpose):
    return zlib.crc32(purpose.encode("utf-8"))


def derive_rng(seed, purpose, *index):
    """Return an independent ``numpy.random.Generator`` for one purpose."""
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    entropy = [seed, _tag(purpose)] + [int(i) for i in index]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def as_rng(seed_or_rng, purpose="default", *index):
    """Pass a ``Generator`` through unchanged; derive one from an integer seed."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return derive_rng(seed_or_rng, purpose, *index)
