"""Stable 64-bit FNV-1a hashing shared by the vectorizer, corpus, and index.

The exact function is part of the artifact contract: feature ids, content
hashes, and index state hashes must be reproducible across runs, platforms,
and Python versions, so Python's randomized ``hash()`` is never used.
"""
from __future__ import annotations

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """FNV-1a over ``data``, 64-bit."""
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def fnv1a64_hex(data: bytes) -> str:
    """Hex-encoded (16 chars, zero-padded) FNV-1a 64-bit hash."""
    return f"{fnv1a64(data):016x}"
