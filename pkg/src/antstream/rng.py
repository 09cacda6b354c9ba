"""Deterministic, platform-independent random number generation.

All stochastic draws in a run come from xorshift128+ generators seeded via
splitmix64. The stream is pinned by this module, not by any library, so a
(seed, config) pair replays bit-exactly everywhere. The simulation and the
evaluation harness use separate streams so that measuring never perturbs
the trajectory.

Draw accounting (one uint64 per draw unless noted):
  - next_double: 1 draw
  - next_below(n): 1 draw
  - next_gaussian: 2 draws (Box-Muller, no spare caching)
  - shuffle(seq): len(seq) - 1 draws (Fisher-Yates, descending)
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1

# Offset mixed into the run seed to derive the evaluation stream.
EVAL_STREAM_TAG = 0x5DEECE66D

_DOUBLE_SCALE = 1.0 / (1 << 53)


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


class Rng:
    """xorshift128+ generator with its state held in a uint64[2] array.

    The state array is shared directly with the jit-compiled simulation
    kernel, which implements the identical update, so Python-side and
    kernel-side draws interleave into one consistent stream.
    """

    def __init__(self, seed: int):
        s = seed & MASK64
        s, a = splitmix64(s)
        s, b = splitmix64(s)
        if a == 0 and b == 0:  # all-zero state is a fixed point
            b = 1
        self.state = np.array([a, b], dtype=np.uint64)

    @classmethod
    def eval_stream(cls, seed: int) -> "Rng":
        """Derive the evaluation-side stream for a run seed."""
        return cls(splitmix64(seed ^ EVAL_STREAM_TAG)[1])

    def next_u64(self) -> int:
        s1 = int(self.state[0])
        s0 = int(self.state[1])
        result = (s0 + s1) & MASK64
        self.state[0] = s0
        s1 ^= (s1 << 23) & MASK64
        self.state[1] = s1 ^ s0 ^ (s1 >> 18) ^ (s0 >> 5)
        return result

    def next_double(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * _DOUBLE_SCALE

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return int(self.next_double() * n)

    def next_gaussian(self, mean: float = 0.0, std: float = 1.0) -> float:
        """Standard Box-Muller; consumes exactly two draws."""
        u1 = self.next_double()
        u2 = self.next_double()
        while u1 == 0.0:
            u1 = self.next_double()
        z = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
        return mean + std * z

    def shuffle(self, seq: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.next_below(i + 1)
            seq[i], seq[j] = seq[j], seq[i]
