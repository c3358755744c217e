"""Counter-mode PRNG keyed by a 64-bit seed and a party label."""

from __future__ import annotations

import hashlib
import struct


class CounterRng:
    """SHA-256(seed || label || counter) blocks, consumed 8 bytes at a time.

    Parties that share a seed but not a label get independent streams.
    """

    def __init__(self, seed: int, label: str = ""):
        if not 0 <= seed < 1 << 64:
            raise ValueError("seed must fit in 64 bits")
        self._key = struct.pack(">Q", seed) + label.encode()
        self._counter = 0
        self._buf = b""

    def _u64(self) -> int:
        if len(self._buf) < 8:
            block = hashlib.sha256(self._key + struct.pack(">Q", self._counter)).digest()
            self._counter += 1
            self._buf += block
        out, self._buf = self._buf[:8], self._buf[8:]
        return int.from_bytes(out, "big")

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection sampling."""
        if n < 1:
            raise ValueError("n must be positive")
        limit = (1 << 64) - (1 << 64) % n
        while True:
            x = self._u64()
            if x < limit:
                return x % n

    def bit(self) -> bool:
        return self.below(2) == 1
