"""Platform-independent pseudo random numbers.

The generator is SplitMix64: the state is a 64-bit counter advanced by the
golden-ratio increment ``0x9E3779B97F4A7C15``; every output is the counter
passed through the mixing function

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

(all arithmetic modulo 2**64). Derived values:

* ``randbelow(k)`` rejects raw outputs ``>= 2**64 - (2**64 mod k)`` and
  returns ``x mod k``, which is unbiased.
* ``random()`` is ``(x >> 11) * 2**-53``, a double in ``[0, 1)``;
  ``uniform(lo, hi)`` is ``lo + (hi - lo) * random()``.
* ``sample(pop, k)`` runs k forward Fisher-Yates steps: for i in 0..k-1
  swap ``pool[i]`` with ``pool[i + randbelow(len - i)]``.
* ``split()`` seeds a child stream with the parent's next output, so
  children are independent of further parent draws.

Identical seeds give identical streams on every platform and Python version.
"""

from __future__ import annotations

import os
from typing import MutableSequence, Sequence, TypeVar

T = TypeVar("T")

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int | None = None):
        self.seeded = seed is not None
        if seed is None:
            seed = int.from_bytes(os.urandom(8), "little")
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return _mix(self.state)

    def randbelow(self, k: int) -> int:
        if k <= 0:
            raise ValueError("randbelow needs k >= 1")
        limit = (1 << 64) - ((1 << 64) % k)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % k

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the closed interval [lo, hi]."""
        return lo + self.randbelow(hi - lo + 1)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self.randbelow(len(seq))]

    def shuffle(self, seq: MutableSequence) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def sample(self, population: Sequence[T], k: int) -> list[T]:
        """``k`` distinct elements, via a partial Fisher-Yates shuffle."""
        pool = list(population)
        if not 0 <= k <= len(pool):
            raise ValueError("sample size out of range")
        for i in range(k):
            j = i + self.randbelow(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def split(self) -> "SplitMix64":
        return SplitMix64(self.next_u64())
