"""Hash families: simple tabulation and a 2-universal modular family.

Tabulation hashing XORs per-character random table lookups; it backs the
light-bucket assignment and enjoys Chernoff-type bin concentration.  The
2-universal family ((a*x + b) mod p) mod m with p = 2^61 - 1 backs the
rehash loop of local semisorting.  Both are immutable after construction
and pure to evaluate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .prng import generator

KEY_BITS = 64
TAB_CHARS = 4
TAB_CHAR_BITS = KEY_BITS // TAB_CHARS

# Mersenne prime modulus of the universal family.
PRIME = (1 << 61) - 1

_U64 = np.uint64


@dataclass(frozen=True)
class TabulationHash:
    """State of a simple tabulation hash: c random tables of 2^char_bits words."""

    tables: np.ndarray  # shape (c, 2**char_bits), uint64, entries < 2**w
    char_bits: int
    w: int

    @property
    def c(self) -> int:
        return self.tables.shape[0]


def tab_new(seed: int, out_bits: int) -> TabulationHash:
    """Draw fresh tabulation tables with ``out_bits`` output bits from ``seed``."""
    if not 1 <= out_bits <= 64:
        raise ValueError(f"output bits must be in [1, 64], got {out_bits}")
    rng = generator(seed, 0x7AB)
    raw = rng.integers(0, 1 << 63, size=(TAB_CHARS, 1 << TAB_CHAR_BITS), dtype=np.uint64)
    raw = (raw << _U64(1)) | rng.integers(0, 2, size=raw.shape, dtype=np.uint64)
    if out_bits < 64:
        raw &= _U64((1 << out_bits) - 1)
    raw.setflags(write=False)
    return TabulationHash(tables=raw, char_bits=TAB_CHAR_BITS, w=out_bits)


def tab_hash(h: TabulationHash, key: int) -> int:
    """XOR of the per-character table entries selected by ``key``."""
    out = 0
    k = int(key)
    mask = (1 << h.char_bits) - 1
    for i in range(h.c):
        out ^= int(h.tables[i, (k >> (i * h.char_bits)) & mask])
    return out


def tab_hash_array(h: TabulationHash, keys: np.ndarray) -> np.ndarray:
    """Vectorized tab_hash over a uint64 key array."""
    keys = keys.astype(np.uint64, copy=False)
    mask = _U64((1 << h.char_bits) - 1)
    out = h.tables[0][keys & mask]
    for i in range(1, h.c):
        out = out ^ h.tables[i][(keys >> _U64(i * h.char_bits)) & mask]
    return out


def tab_bucket(h: TabulationHash, keys: np.ndarray, n_buckets: int) -> np.ndarray:
    """Map keys into [0, n_buckets) by multiply-shift on the w-bit hash value.

    Multiply-shift keeps the map monotone in the hash value and avoids the
    low-bucket bias a modulo reduction would introduce.  Requires
    h.w == ceil(log2(n_buckets)) so the product fits in 64 bits.
    """
    if n_buckets < 1:
        raise ValueError("bucket count must be positive")
    hv = tab_hash_array(h, keys)
    if n_buckets == 1:
        return np.zeros(len(hv), dtype=np.int64)
    return ((hv * _U64(n_buckets)) >> _U64(h.w)).astype(np.int64)


def bits_for_buckets(n_buckets: int) -> int:
    return max(1, (n_buckets - 1).bit_length())


@dataclass(frozen=True)
class UniversalHash:
    """Parameters of h_{a,b}(x) = ((a*x + b) mod p) mod m."""

    a: int
    b: int
    p: int
    m: int


def universal_new(seed: int, m: int) -> UniversalHash:
    if m < 1:
        raise ValueError(f"range must be positive, got {m}")
    rng = generator(seed, 0x2FA)
    a = 1 + int(rng.integers(0, PRIME - 1))
    b = int(rng.integers(0, PRIME))
    return UniversalHash(a=a, b=b, p=PRIME, m=m)


def universal_hash(g: UniversalHash, key: int) -> int:
    """Exact ((a*key + b) mod p) mod m via arbitrary-precision arithmetic."""
    return ((g.a * int(key) + g.b) % g.p) % g.m


def _fold_p61(x: np.ndarray) -> np.ndarray:
    """Reduce uint64 values modulo 2^61 - 1 (result in [0, p))."""
    p = _U64(PRIME)
    x = (x & p) + (x >> _U64(61))
    x = (x & p) + (x >> _U64(61))
    return np.where(x >= p, x - p, x)


def universal_hash_array(g: UniversalHash, keys: np.ndarray) -> np.ndarray:
    """Vectorized universal_hash; exact mod-p arithmetic via 31-bit limbs."""
    x = _fold_p61(keys.astype(np.uint64, copy=False))
    lo31 = _U64((1 << 31) - 1)
    a0 = _U64(g.a & ((1 << 31) - 1))
    a1 = _U64(g.a >> 31)
    x0 = x & lo31
    x1 = x >> _U64(31)
    hi = a1 * x1                      # < 2^60
    mid = a1 * x0 + a0 * x1           # < 2^62
    lo = a0 * x0                      # < 2^62
    # a*x = hi*2^62 + mid*2^31 + lo, and 2^61 = 1 (mod p).
    mid_lo = mid & _U64((1 << 30) - 1)
    mid_hi = mid >> _U64(30)
    s = (hi << _U64(1)) + mid_hi + (mid_lo << _U64(31)) + lo  # < 2^63
    s = _fold_p61(s)
    s = s + _U64(g.b)
    s = _fold_p61(s)
    return s % _U64(g.m)


def detect_collision(hashes: np.ndarray, keys: np.ndarray) -> bool:
    """True iff some adjacent pair (sorted by hash) shares a hash but not a key."""
    if len(hashes) < 2:
        return False
    return bool(np.any((hashes[1:] == hashes[:-1]) & (keys[1:] != keys[:-1])))
