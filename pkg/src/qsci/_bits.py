"""Bit-twiddling helpers shared by the qubit-register modules.

Basis-index convention used everywhere: qubit 0 is the least significant
bit, qubit 2p holds the spin-alpha occupation of spatial orbital p and
qubit 2p+1 the spin-beta occupation.
"""

from __future__ import annotations

import numpy as np

_EVEN_MASK = 0x5555555555555555


def popcount_array(a: np.ndarray) -> np.ndarray:
    """Per-element set-bit count of an unsigned integer array."""
    return np.bitwise_count(a)


def parity_array(a: np.ndarray) -> np.ndarray:
    """Per-element parity (0 or 1) of the set-bit count."""
    return np.bitwise_count(a) & 1


def sign_array(a: np.ndarray) -> np.ndarray:
    """(-1)**popcount as an int8 array."""
    return (1 - 2 * (np.bitwise_count(a) & 1)).astype(np.int8)


def spread_bits(x: int) -> int:
    """Insert a zero bit after every bit: bit p moves to position 2p."""
    x &= 0xFFFFFFFF
    x = (x | (x << 16)) & 0x0000FFFF0000FFFF
    x = (x | (x << 8)) & 0x00FF00FF00FF00FF
    x = (x | (x << 4)) & 0x0F0F0F0F0F0F0F0F
    x = (x | (x << 2)) & 0x3333333333333333
    x = (x | (x << 1)) & _EVEN_MASK
    return x


def compress_even_bits(x: int) -> int:
    """Inverse of :func:`spread_bits`: gather bits at even positions."""
    x &= _EVEN_MASK
    x = (x | (x >> 1)) & 0x3333333333333333
    x = (x | (x >> 2)) & 0x0F0F0F0F0F0F0F0F
    x = (x | (x >> 4)) & 0x00FF00FF00FF00FF
    x = (x | (x >> 8)) & 0x0000FFFF0000FFFF
    x = (x | (x >> 16)) & 0xFFFFFFFF
    return x


def iter_bits(mask: int):
    """Yield set-bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_between(mask: int, i: int, j: int) -> int:
    """Count set bits of ``mask`` strictly between positions i and j."""
    lo, hi = (i, j) if i < j else (j, i)
    window = ((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1)
    return (mask & window).bit_count()
