"""
Seed policy.

Every stochastic run starts from one 64-bit master seed. Independent streams
(per replica, per batch, per command stage) get child seeds from
seed_split(master, stream_id):

    child = int.from_bytes(BLAKE2b(stream_id, key=master as 8 LE bytes, digest_size=8), "little")

The construction is stable across 0.x releases; changing it is a breaking
change of every recorded seed.
"""

import hashlib

import numpy as np

SEED_BITS = 64
_MASK     = (1 << SEED_BITS) - 1


def seed_split(master: int, stream_id: str) -> int:
    if not 0 <= master <= _MASK:
        raise ValueError(f"master seed must fit in {SEED_BITS} unsigned bits, got {master}")
    digest = hashlib.blake2b(
        str(stream_id).encode("utf-8"),
        key=int(master).to_bytes(8, "little"),
        digest_size=8,
    ).digest()
    return int.from_bytes(digest, "little")


def make_rng(master: int, stream_id: str) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_split(master, stream_id)))


def seed_record(master: int, stream_id: str) -> dict:
    """Seed block embedded in result metadata."""
    return {"master": int(master), "stream": str(stream_id), "child": seed_split(master, stream_id)}
