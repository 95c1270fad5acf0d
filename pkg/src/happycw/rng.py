"""Small deterministic PRNG so generated instances are reproducible byte for byte.

xorshift64* (Vigna 2016: shifts 12, 25, 27, multiplier 0x2545F4914F6CDD1D),
seeded through one SplitMix64 step so that every 64-bit seed, including 0,
gives a nonzero state.  ``below(n)`` is the multiply-shift reduction
``(x * n) >> 64``; its bias is below ``n / 2**64`` and irrelevant here.
"""

from __future__ import annotations

MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


class XorShift64Star:
    def __init__(self, seed: int):
        self.state = splitmix64(seed & MASK) or 1

    def next(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & MASK

    def below(self, n: int) -> int:
        """Uniform-ish integer in ``[0, n)``."""
        if n <= 0:
            raise ValueError("n must be positive")
        return (self.next() * n) >> 64

    def between(self, lo: int, hi: int) -> int:
        """Integer in the closed range ``[lo, hi]``."""
        return lo + self.below(hi - lo + 1)

    def random(self) -> float:
        return (self.next() >> 11) * (1.0 / (1 << 53))

    def chance(self, p: float) -> bool:
        return self.random() < p

    def choice(self, seq):
        return seq[self.below(len(seq))]
