"""Reproducible randomness: one root seed, many derived streams.

A stream is identified by ``(seed, stream_id)``.  Child streams get their id
from a BLAKE2b hash of the parent id and a label, so ``derive("adversary")``
and ``derive("oracle")`` never share draws, and trial ``t`` of an estimate is
``RngStream(seed, t)`` no matter how many other trials run.
"""

from __future__ import annotations

import hashlib
import os
import random

SEED_ENV_VAR = "WBC_ARENA_SEED"
_MASK64 = (1 << 64) - 1


def _digest(*parts: object) -> bytes:
    h = hashlib.blake2b(digest_size=32, person=b"wbc-arena-rng")
    for p in parts:
        data = str(p).encode()
        h.update(len(data).to_bytes(4, "big"))
        h.update(data)
    return h.digest()


def derive_seed(seed: int, *labels: object) -> int:
    """Map a seed and labels to a fresh 64-bit seed."""
    return int.from_bytes(_digest("seed", seed, *labels)[:8], "big")


def env_seed(default: int = 0) -> int:
    value = os.environ.get(SEED_ENV_VAR)
    return int(value) if value not in (None, "") else default


class RngStream:
    __slots__ = ("seed", "stream_id", "_rand")

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = seed & _MASK64
        self.stream_id = stream_id
        self._rand = random.Random(int.from_bytes(_digest("stream", self.seed, stream_id), "big"))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def derive(self, label: object) -> "RngStream":
        child = int.from_bytes(_digest("child", self.stream_id, label)[:8], "big")
        return RngStream(self.seed, child)

    def getrandbits(self, n: int) -> int:
        return self._rand.getrandbits(n) if n else 0

    def bits(self, n: int) -> str:
        return format(self._rand.getrandbits(n), f"0{n}b") if n else ""

    def bit(self) -> str:
        return "1" if self._rand.getrandbits(1) else "0"

    def randbelow(self, n: int) -> int:
        return self._rand.randrange(n)

    def random(self) -> float:
        return self._rand.random()
