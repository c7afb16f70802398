"""Deterministic pseudo-random stream used by every training routine.

splitmix64: output i of a stream seeded with s is mix64(s + (i + 1) * GAMMA),
a pure function of (s, i). That makes the stream cheap to generate in bulk
with numpy while staying reproducible across platforms and backends, which is
the contract the trainers rely on. Sample indices are drawn by reducing the
64-bit output modulo n; the modulo bias is negligible (n is at most a few
million) and irrelevant to the determinism contract.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Stateful wrapper counting how many outputs have been drawn."""

    def __init__(self, seed: int):
        self._seed = seed & _MASK64
        self._drawn = 0

    def next_uint64(self) -> int:
        self._drawn += 1
        return _mix64((self._seed + self._drawn * _GAMMA) & _MASK64)

    def indices(self, count: int, n: int) -> np.ndarray:
        """Draw `count` sample indices in [0, n), advancing the stream.

        Equal to [next_uint64() % n] * count, but vectorised.
        """
        if n <= 0:
            raise ValueError("n must be positive")
        if count < 0:
            raise ValueError("count must be nonnegative")
        start = self._drawn + 1
        self._drawn += count
        i = np.arange(start, start + count, dtype=np.uint64)
        z = np.uint64(self._seed) + i * np.uint64(_GAMMA)  # wraps mod 2**64
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
        return (z % np.uint64(n)).astype(np.int64)
