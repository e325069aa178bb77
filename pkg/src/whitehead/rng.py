"""Splittable counter-based randomness for reproducible, order-independent trials.

Every sampler in this package draws from a `CounterRng` keyed by a tuple of
identifying parts (master seed, experiment id, trial index, ...).  Draw `i`
depends only on (key, i), so parallel trials and resumed runs produce
bit-identical streams regardless of execution order.
"""

from __future__ import annotations

import hashlib

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INV53 = 1.0 / (1 << 53)


def derive_key(*parts) -> int:
    """Hash an arbitrary tuple of parts down to a 64-bit key."""
    digest = hashlib.sha256(repr(parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _mix(z: int) -> int:
    # SplitMix64 finalizer
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


class CounterRng:
    """Stateless counter-keyed generator: value(i) is a pure function of (key, i)."""

    __slots__ = ("key",)

    def __init__(self, *parts):
        self.key = derive_key(*parts) if len(parts) != 1 or not isinstance(parts[0], int) else parts[0] & _MASK64

    def raw(self, i: int) -> int:
        return _mix((self.key + (i + 1) * _GOLDEN) & _MASK64)

    def uniform(self, i: int) -> float:
        """Uniform float in [0, 1) for counter i."""
        return (self.raw(i) >> 11) * _INV53

    def randrange(self, i: int, n: int) -> int:
        """Integer in [0, n) for counter i."""
        return int(self.uniform(i) * n)


def spawn_seed(*parts) -> int:
    """Derive a child seed; used for per-trial seeds hash(master, exp, n, trial)."""
    return derive_key(*parts)
