"""Counter-based randomness built on the SplitMix64 finalizer.

Every random quantity is a pure function of integer keys, e.g. the coin of
edge ``e`` in Monte Carlo trial ``i`` under base seed ``s`` is
``uniform(derive(s, i), e)``.  Results therefore do not depend on execution
order or worker count, and are identical on every platform.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """SplitMix64 output function (Steele, Lea & Flood 2014)."""
    z = (z + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive(seed: int, *keys: int) -> int:
    """Fold integer keys into a new 64-bit seed."""
    h = mix64(seed & MASK64)
    for k in keys:
        h = mix64(h ^ (k & MASK64))
    return h


def uniform(key: int, counter: int) -> float:
    """Uniform double in [0, 1) addressed by ``(key, counter)``."""
    return (mix64(key ^ ((counter * _GOLDEN) & MASK64)) >> 11) * _INV_2_53


class SplitMix64:
    """Sequential stream, used where draws are naturally ordered (query generation)."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        return (self.next_u64() >> 11) * _INV_2_53

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def uniform(self, a: float, b: float) -> float:
        return a + (b - a) * self.random()

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]

    def sample(self, seq, k: int) -> list:
        pool = list(seq)
        if k > len(pool):
            raise ValueError("sample larger than population")
        for i in range(k):
            j = i + self.randbelow(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def shuffle(self, seq: list) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]
