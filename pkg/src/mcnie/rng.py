"""Seedable byte generator used for every random draw in the package.

SHAKE-256 in counter mode: block i is SHAKE256(seed || i) truncated to 136
bytes.  Same seed, same stream, on every platform.
"""
from __future__ import annotations

import hashlib
import os

_BLOCK = 136


class Drbg:

    def __init__(self, seed: bytes | str | int):
        if isinstance(seed, int):
            seed = seed.to_bytes(max(1, (seed.bit_length() + 7) // 8), "little")
        elif isinstance(seed, str):
            seed = bytes.fromhex(seed)
        self.seed = bytes(seed)
        self._counter = 0
        self._buf = b""

    @classmethod
    def from_entropy(cls) -> "Drbg":
        return cls(os.urandom(32))

    def spawn(self, label: bytes | int) -> "Drbg":
        """Independent child stream; does not consume bytes from self."""
        if isinstance(label, int):
            label = label.to_bytes(8, "little")
        return Drbg(hashlib.shake_256(b"spawn" + self.seed + label).digest(32))

    def randbytes(self, n: int) -> bytes:
        while len(self._buf) < n:
            block = hashlib.shake_256(
                self.seed + self._counter.to_bytes(8, "little")).digest(_BLOCK)
            self._counter += 1
            self._buf += block
        out, self._buf = self._buf[:n], self._buf[n:]
        return out

    def getrandbits(self, k: int) -> int:
        if k <= 0:
            return 0
        x = int.from_bytes(self.randbytes((k + 7) // 8), "little")
        return x & ((1 << k) - 1)

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randbelow needs a positive bound")
        k = n.bit_length()
        while True:
            x = self.getrandbits(k)
            if x < n:
                return x
