"""Portable 64-bit pseudo-random stream (splitmix64).

The i-th output for seed s is mix(s + i * GOLDEN) over Z/2^64 with the
standard splitmix64 finalizer, so the stream is a pure function of (seed, i):
counter-based, reproducible across platforms and Python/numpy versions, and
cheap to vectorize.  Doubles take the top 53 bits, uniform on [0, 1).
"""

from __future__ import annotations

import numpy as np

__all__ = ["PRNG_ID", "SplitMix64"]

PRNG_ID = "splitmix64-1.0"

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix_int(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Stateful view of the splitmix64 stream for a given seed."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        self.counter = 0

    def next_u64(self) -> int:
        self.counter += 1
        return _mix_int((self.seed + self.counter * _GOLDEN) & _MASK)

    def next_float(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * 2.0**-53

    def floats(self, n: int) -> np.ndarray:
        """Next ``n`` uniform doubles, vectorized (same stream as next_float)."""
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            z = np.uint64(self.seed) + idx * np.uint64(_GOLDEN)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
            z = z ^ (z >> np.uint64(31))
        return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53
