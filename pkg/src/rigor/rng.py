"""Counter-based splitmix64 streams.

Output ``i`` of a stream with seed ``s`` is ``mix64(s + (i + 1) * GOLDEN)``
(all arithmetic mod 2**64), i.e. the reference splitmix64 sequence. With seed 0
the first three outputs are::

    0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F

Substreams are keyed by mixing the parent seed with a label, so trial ``i``
of an experiment sees the same numbers regardless of scheduling.
"""

from __future__ import annotations

import hashlib

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1

_G = np.uint64(GOLDEN)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)


def mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _C1
    z = (z ^ (z >> np.uint64(27))) * _C2
    return z ^ (z >> np.uint64(31))


def _label_key(label) -> int:
    if isinstance(label, (int, np.integer)) and not isinstance(label, bool):
        return int(label) & _MASK
    text = repr(label) if not isinstance(label, str) else label
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "little")


def derive_seed(seed: int, *labels) -> int:
    """Seed of the substream reached from ``seed`` through ``labels`` in order."""
    s = int(seed) & _MASK
    for label in labels:
        s = mix64(s ^ mix64((_label_key(label) + GOLDEN) & _MASK))
    return s


class RngStream:
    """Single-owner stream; ``counter`` counts outputs consumed so far."""

    def __init__(self, seed: int, counter: int = 0):
        self.seed = int(seed) & _MASK
        self.counter = int(counter)

    def derive(self, *labels) -> "RngStream":
        return RngStream(derive_seed(self.seed, *labels))

    def peek_u64(self, start: int, count: int) -> np.ndarray:
        """Outputs ``start .. start+count-1`` without moving the counter."""
        idx = np.arange(start + 1, start + 1 + count, dtype=np.uint64)
        with np.errstate(over="ignore"):
            return _mix_array(np.uint64(self.seed) + idx * _G)

    def next_u64(self, count: int) -> np.ndarray:
        out = self.peek_u64(self.counter, count)
        self.counter += count
        return out

    def uniform(self, count: int) -> np.ndarray:
        """Doubles in [0, 1) with 53 random bits."""
        return (self.next_u64(count) >> np.uint64(11)) * (1.0 / (1 << 53))

    def residues(self, count: int, modulus: int) -> np.ndarray:
        """Uniform integers in [0, modulus) for a 61-bit modulus, by rejection."""
        out = np.empty(count, np.uint64)
        filled = 0
        while filled < count:
            raw = self.next_u64(count - filled) >> np.uint64(3)
            raw = raw[raw < np.uint64(modulus)]
            out[filled: filled + raw.size] = raw
            filled += raw.size
        return out

    def __repr__(self):
        return f"RngStream(seed={self.seed:#x}, counter={self.counter})"
