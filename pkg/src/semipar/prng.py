"""Counter-based deterministic randomness.

All randomized components derive their random bits from a 64-bit seed via
splitmix64-style mixing, so that any (seed, counter...) tuple maps to a
reproducible stream independent of call order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def mix64(x: int) -> int:
    """Finalizer of splitmix64: bijective 64-bit mix of ``x``."""
    x &= _MASK64
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive(seed: int, *ids: int) -> int:
    """Derive a child seed from ``seed`` and a tuple of stream identifiers."""
    s = mix64(seed)
    for i in ids:
        s = mix64(s ^ mix64(i))
    return s


def mix64_array(x: np.ndarray) -> np.ndarray:
    """Vectorized splitmix64 finalizer over a uint64 array."""
    z = x.astype(np.uint64) + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def counter_uniforms(seed: int, counters: np.ndarray) -> np.ndarray:
    """One uint64 per counter value, determined by (seed, counter) alone."""
    return mix64_array(counters.astype(np.uint64) ^ np.uint64(mix64(seed)))


def generator(seed: int, *ids: int) -> np.random.Generator:
    """A numpy Generator keyed to (seed, *ids); Philox is counter-based."""
    return np.random.Generator(np.random.Philox(key=derive(seed, *ids)))
