"""Seeded ChaCha20 keystream used as the only source of randomness."""

from __future__ import annotations

import hashlib
from typing import MutableSequence, Sequence, TypeVar

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms

T = TypeVar("T")

_CHUNK = 4096


class PrngStream:
    """ChaCha20 keystream (zero nonce, counter from 0) keyed by a 32-byte seed.

    ``position`` counts keystream bytes consumed so far. Two streams with the
    same seed that are consumed identically produce identical values on every
    platform.
    """

    def __init__(self, seed: bytes, position: int = 0):
        if len(seed) != 32:
            raise ValueError("seed must be 32 bytes")
        if position < 0:
            raise ValueError("position must be non-negative")
        self.seed = bytes(seed)
        self.position = position
        block, skip = divmod(position, 64)
        nonce = block.to_bytes(4, "little") + bytes(12)
        self._enc = Cipher(algorithms.ChaCha20(self.seed, nonce), mode=None).encryptor()
        self._buf = self._enc.update(bytes(_CHUNK))[skip:]

    @classmethod
    def from_int(cls, value: int) -> "PrngStream":
        """Stream for a user-facing unsigned 64-bit seed."""
        if not 0 <= value < 1 << 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        return cls(hashlib.sha256(value.to_bytes(8, "little")).digest())

    def substream(self, index: int) -> "PrngStream":
        """Independent stream keyed by SHA-256(seed || index as little-endian u64)."""
        return PrngStream(hashlib.sha256(self.seed + index.to_bytes(8, "little")).digest())

    def copy(self) -> "PrngStream":
        return PrngStream(self.seed, self.position)

    def read(self, nbytes: int) -> bytes:
        while len(self._buf) < nbytes:
            self._buf += self._enc.update(bytes(_CHUNK))
        out, self._buf = self._buf[:nbytes], self._buf[nbytes:]
        self.position += nbytes
        return out

    def randbelow(self, m: int) -> int:
        """Uniform integer in [0, m) by rejection on the fewest whole bytes."""
        if m < 1:
            raise ValueError("m must be positive")
        if m == 1:
            return 0
        nbytes = ((m - 1).bit_length() + 7) // 8
        span = 1 << (8 * nbytes)
        limit = span - span % m
        while True:
            v = int.from_bytes(self.read(nbytes), "big")
            if v < limit:
                return v % m

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (int.from_bytes(self.read(8), "big") >> 11) / float(1 << 53)

    def shuffle(self, items: MutableSequence[T]) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, population: Sequence[T], k: int) -> list[T]:
        """k distinct elements, in draw order."""
        pool = list(population)
        if not 0 <= k <= len(pool):
            raise ValueError("sample larger than population")
        out = []
        for _ in range(k):
            out.append(pool.pop(self.randbelow(len(pool))))
        return out

    def __repr__(self):
        return f"PrngStream(seed={self.seed.hex()[:16]}..., position={self.position})"
