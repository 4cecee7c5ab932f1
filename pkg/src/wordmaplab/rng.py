"""Deterministic 64-bit PRNG used by every sampling code path.

The generator is SplitMix64 in counter mode: output k of a stream with seed
``s`` is ``mix64((s + (k+1) * GOLDEN) mod 2**64)`` where ``mix64`` is the
standard SplitMix64 finalizer.  Counter mode makes scalar and vectorized
generation produce identical streams, which keeps sampled results bit-for-bit
reproducible across platforms and worker counts.  Nothing here depends on the
stdlib ``random`` module or on floating point.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective mixing of a 64-bit value."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """Seed for the ``index``-th child stream (used for per-chunk streams)."""
    return mix64((master + (index + 1) * GOLDEN) & MASK64)


class SplitMix64:
    """Scalar view of the stream: successive calls walk the counter."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by unbiased rejection sampling."""
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        limit = MASK64 + 1 - ((MASK64 + 1) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def sample(self, population: int, k: int) -> list[int]:
        """k distinct integers from [0, population), by partial Fisher-Yates."""
        if not 0 <= k <= population:
            raise ValueError(f"cannot sample {k} from {population}")
        swapped: dict[int, int] = {}
        out = []
        for i in range(k):
            j = i + self.randbelow(population - i)
            out.append(swapped.get(j, j))
            swapped[j] = swapped.get(i, i)
        return out


def u64_block(seed: int, start: int, count: int) -> np.ndarray:
    """Counter positions start..start+count-1 of the stream, vectorized."""
    ctr = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = (np.uint64(seed) + ctr * np.uint64(GOLDEN))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def randbelow_block(seed: int, n: int, count: int) -> np.ndarray:
    """First ``count`` accepted draws of the rejection rule, vectorized.

    The rule matches ``SplitMix64.randbelow`` exactly: walk counter positions
    in order, skip raw values >= the rejection limit, reduce the rest mod n.
    Results are int64, so n is capped at 2**63.
    """
    if n <= 0:
        raise ValueError("randbelow needs n >= 1")
    if n > 1 << 63:
        raise ValueError("randbelow_block supports n up to 2**63")
    limit = MASK64 + 1 - ((MASK64 + 1) % n)
    out = np.empty(count, dtype=np.int64)
    got = 0
    pos = 0
    while got < count:
        m = (count - got) + 16
        block = u64_block(seed, pos, m)
        pos += m
        # When n divides 2**64 every raw value is accepted and the limit
        # (2**64 itself) does not fit in a uint64, so skip the comparison.
        acc = block if limit > MASK64 else block[block < np.uint64(limit)]
        take = min(count - got, acc.shape[0])
        out[got:got + take] = (acc[:take] % np.uint64(n)).astype(np.int64)
        got += take
    return out
