"""64-bit value hashing.

Container hashes are built by hashing each element, passing the element
hash through a strong mixing function, and combining the mixed hashes
with wrapping addition modulo 2**64.  Addition is commutative, so the
hash of an unordered container does not depend on storage order, and it
is invertible, so removing an element subtracts exactly what adding it
contributed.  The mixer is MurmurHash3 (x64, 128-bit) folded to 64 bits
by XORing the two output halves.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1

_C1 = 0x87C37B91114253D5
_C2 = 0x4CF5AD432745937F


def _rotl64(x: int, r: int) -> int:
    return ((x << r) | (x >> (64 - r))) & MASK64


def _fmix64(k: int) -> int:
    k ^= k >> 33
    k = (k * 0xFF51AFD7ED558CCD) & MASK64
    k ^= k >> 33
    k = (k * 0xC4CEB9FE1A85EC53) & MASK64
    k ^= k >> 33
    return k


def murmur3_x64_128(data: bytes, seed: int = 0) -> tuple[int, int]:
    """MurmurHash3 x64 128-bit variant, returned as a pair of 64-bit ints."""
    length = len(data)
    h1 = h2 = seed & MASK64
    nblocks = length // 16
    for i in range(nblocks):
        off = i * 16
        k1 = int.from_bytes(data[off:off + 8], "little")
        k2 = int.from_bytes(data[off + 8:off + 16], "little")
        k1 = (k1 * _C1) & MASK64
        k1 = _rotl64(k1, 31)
        k1 = (k1 * _C2) & MASK64
        h1 ^= k1
        h1 = _rotl64(h1, 27)
        h1 = (h1 + h2) & MASK64
        h1 = (h1 * 5 + 0x52DCE729) & MASK64
        k2 = (k2 * _C2) & MASK64
        k2 = _rotl64(k2, 33)
        k2 = (k2 * _C1) & MASK64
        h2 ^= k2
        h2 = _rotl64(h2, 31)
        h2 = (h2 + h1) & MASK64
        h2 = (h2 * 5 + 0x38495AB5) & MASK64
    tail = data[nblocks * 16:]
    tl = len(tail)
    if tl > 8:
        k2 = int.from_bytes(tail[8:], "little")
        k2 = (k2 * _C2) & MASK64
        k2 = _rotl64(k2, 33)
        k2 = (k2 * _C1) & MASK64
        h2 ^= k2
    if tl > 0:
        k1 = int.from_bytes(tail[:min(tl, 8)], "little")
        k1 = (k1 * _C1) & MASK64
        k1 = _rotl64(k1, 31)
        k1 = (k1 * _C2) & MASK64
        h1 ^= k1
    h1 ^= length
    h2 ^= length
    h1 = (h1 + h2) & MASK64
    h2 = (h2 + h1) & MASK64
    h1 = _fmix64(h1)
    h2 = _fmix64(h2)
    h1 = (h1 + h2) & MASK64
    h2 = (h2 + h1) & MASK64
    return h1, h2


_mix_cache = {}


def mix(h: int) -> int:
    """Scatter a 64-bit hash so that similar inputs stop being similar."""
    out = _mix_cache.get(h)
    if out is None:
        a, b = murmur3_x64_128(h.to_bytes(8, "little"))
        out = a ^ b
        if len(_mix_cache) < (1 << 20):
            _mix_cache[h] = out
    return out


def combine_ordered(hashes) -> int:
    """Hash a fixed shape of member hashes: concatenate and rehash.

    Used for tuples, where member order matters and the arity is small.
    """
    data = b"".join(h.to_bytes(8, "little") for h in hashes)
    a, b = murmur3_x64_128(data)
    return a ^ b


def pair_hash(index: int, member_hash: int) -> int:
    """Hash of an (index, member) tuple, used for sequence entries."""
    return combine_ordered((index & MASK64, member_hash))


def int_hash(i: int) -> int:
    """Integers hash to themselves, reinterpreted as unsigned 64-bit."""
    return i & MASK64
