"""Deterministic 64-bit PRNG used for all sampling draws.

The generator is SplitMix64 (Steele, Lea & Flood's SplittableRandom finalizer,
as published in Vigna's reference C implementation): the state advances by a
fixed odd constant and each output is an avalanching mix of the new state.
Because the state after ``i`` draws is just ``seed + (i+1) * GOLDEN_GAMMA``
(mod 2^64), any stream position can be addressed directly, which keeps the
stateless per-call binding API and the in-process session in lockstep.

Uniform doubles take the top 53 bits of an output: ``(x >> 11) * 2^-53``,
giving values in [0, 1).

Reference first outputs (frozen in the test suite against an independent C
build of the published algorithm): seed 0 -> 16294208416658607535,
seed 1234567 -> 6457827717110365317.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_TO_UNIT = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 output stage: two xor-shift-multiply rounds and a final shift."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def uint64_at(seed: int, index: int) -> int:
    """The index-th (0-based) raw output of the stream started at ``seed``."""
    if index < 0:
        raise ValueError(f"index must be non-negative, got {index}")
    return mix64((seed + (index + 1) * GOLDEN_GAMMA) & MASK64)


def uniform_at(seed: int, index: int) -> float:
    """The index-th uniform double in [0, 1) of the stream started at ``seed``."""
    return (uint64_at(seed, index) >> 11) * _TO_UNIT


class SplitMix64:
    """Sequential view of the stream; one instance per generation session."""

    __slots__ = ("seed", "_state", "draws")

    def __init__(self, seed: int):
        if not 0 <= seed <= MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self._state = seed
        self.draws = 0

    def next_uint64(self) -> int:
        self._state = (self._state + GOLDEN_GAMMA) & MASK64
        self.draws += 1
        return mix64(self._state)

    def next_uniform(self) -> float:
        """Next double in [0, 1), consuming one raw output."""
        return (self.next_uint64() >> 11) * _TO_UNIT
