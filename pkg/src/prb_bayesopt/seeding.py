"""Split-seed contract: derive independent child streams from a root seed.

Every seeded operation takes either an integer seed or a SeedSequence. Child
streams are addressed by integer keys (draw index, step, purpose tag), so that
the same (root, keys) always yields the same stream regardless of call order.
"""

import zlib

import numpy as np

type Seed = int | np.random.SeedSequence


def as_seed_sequence(seed: Seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def tag(name: str) -> int:
    """Stable integer key for a purpose label."""
    return zlib.crc32(name.encode())


def child_seed(seed: Seed, *keys: int | str) -> np.random.SeedSequence:
    """Child stream of ``seed`` addressed by ``keys``."""
    parent = as_seed_sequence(seed)
    spawn_key = tuple(k if isinstance(k, int) else tag(k) for k in keys)
    return np.random.SeedSequence(
        entropy=parent.entropy,
        spawn_key=(*parent.spawn_key, *spawn_key),
        pool_size=parent.pool_size,
    )


def make_rng(seed: Seed, *keys: int | str) -> np.random.Generator:
    return np.random.default_rng(child_seed(seed, *keys) if keys else as_seed_sequence(seed))


def int_seed(seed: Seed, *keys: int | str) -> int:
    """32-bit integer form of a child stream, for APIs that only take ints."""
    return int(child_seed(seed, *keys).generate_state(1)[0])
