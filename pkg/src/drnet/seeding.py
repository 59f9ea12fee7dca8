"""Deterministic sub-seed derivation.

Every stochastic component gets its own seed derived by hashing the
master seed with a component path, so adding or reordering work (or
running cells in parallel) never shifts anyone else's random stream.
"""

import hashlib
import random


def derive_seed(master: int, *parts) -> int:
    key = "/".join([str(master), *map(str, parts)]).encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def derive_rng(master: int, *parts) -> random.Random:
    return random.Random(derive_seed(master, *parts))
