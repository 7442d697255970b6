"""Deterministic random number generation.

Every stochastic choice in the toolkit (base-vector bits, cluster seeding,
epoch shuffles) flows through the generator defined here, so that a saved
model is reproducible from its stored 64-bit seed alone, independent of
platform and numpy version.

Generator: xoshiro256** (Blackman/Vigna), state seeded from the 64-bit
user seed via the splitmix64 expander. The stream identity is recorded in
model files under the name `PRNG_ID` below; any change to the generation
scheme must bump that tag.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

#: Versioned identity of the bit stream, stored in model files.
PRNG_ID = "xoshiro256ss-v1"


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def derive_seed(master: int, *tags: int | str) -> int:
    """Derive a stream seed from a master seed and a tag path.

    Used to give each subsystem (encoder, per-class clustering, epoch
    shuffles, ...) its own decorrelated stream while keeping a single
    user-facing seed. Mixing is splitmix64 over the tag bytes.
    """
    s = master & MASK64
    for tag in tags:
        if isinstance(tag, str):
            data = tag.encode("utf-8")
            for i in range(0, len(data), 8):
                chunk = int.from_bytes(data[i : i + 8], "little")
                s, out = splitmix64(s ^ chunk)
                s ^= out
        else:
            s, out = splitmix64(s ^ (int(tag) & MASK64))
            s ^= out
    _, out = splitmix64(s)
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    """xoshiro256** stream with the seeding convention fixed for model files.

    The four state words are the first four outputs of splitmix64 run from
    the user seed (the upstream-recommended initialization, which also
    guarantees a non-zero state).
    """

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        sm = seed & MASK64
        sm, self.s0 = splitmix64(sm)
        sm, self.s1 = splitmix64(sm)
        sm, self.s2 = splitmix64(sm)
        sm, self.s3 = splitmix64(sm)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def fill_words(self, n: int) -> np.ndarray:
        """n raw 64-bit words as a uint64 array."""
        nxt = self.next_u64
        return np.array([nxt() for _ in range(n)], dtype=np.uint64)

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def randbelow(self, n: int) -> int:
        """Integer in [0, n) via the multiply-shift range reduction."""
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        return (self.next_u64() * n) >> 64

    def permutation(self, n: int) -> np.ndarray:
        """Deterministic permutation of range(n) by sorting random keys."""
        keys = self.fill_words(n)
        return np.argsort(keys, kind="stable")

    def choice_weighted(self, weights: np.ndarray) -> int:
        """Index drawn proportionally to non-negative weights.

        All-zero weights fall back to a uniform draw.
        """
        w = np.asarray(weights, dtype=np.float64)
        total = float(w.sum())
        if total <= 0.0:
            return self.randbelow(len(w))
        r = self.uniform() * total
        cum = np.cumsum(w)
        return int(np.searchsorted(cum, r, side="right").clip(0, len(w) - 1))
