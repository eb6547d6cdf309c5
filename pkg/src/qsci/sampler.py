"""Computational-basis measurement with seeded, counter-based randomness.

Sampling draws i.i.d. basis indices from |amplitude|^2 by inverse-CDF over
the cumulative probability array, using the Philox counter-based generator
so identical (state, shots, seed) inputs reproduce bit-identical counts on
any platform. Bitstring text is written with qubit 0 rightmost.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ._bits import popcount_array
from .statevector import StateVector

__all__ = [
    "BitstringCounts",
    "NoiseSpec",
    "sample_counts",
    "inject_readout_noise",
    "hamming_weight_histogram",
    "merge_counts",
    "derive_seed",
]


@dataclass
class BitstringCounts:
    """Measurement record: basis-index keys with occurrence counts."""

    n_qubits: int
    shots: int
    counts: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not sum to the shot total")
        limit = 1 << self.n_qubits
        if any(not 0 <= k < limit for k in self.counts):
            raise ValueError("bitstring key outside the register range")

    def key_text(self, key: int) -> str:
        return format(key, f"0{self.n_qubits}b")

    def to_lines(self) -> str:
        """`bitstring count` lines, descending count, ties lexicographic."""
        items = sorted(self.counts.items(), key=lambda kv: (-kv[1], self.key_text(kv[0])))
        return "\n".join(f"{self.key_text(k)} {v}" for k, v in items) + "\n"

    @classmethod
    def from_lines(cls, text: str) -> "BitstringCounts":
        counts: dict[int, int] = {}
        width = None
        for line in text.splitlines():
            if not line.strip():
                continue
            bits, cnt = line.split()
            width = len(bits) if width is None else width
            if len(bits) != width:
                raise ValueError("inconsistent bitstring widths in counts file")
            counts[int(bits, 2)] = counts.get(int(bits, 2), 0) + int(cnt)
        if width is None:
            raise ValueError("empty counts file")
        return cls(n_qubits=width, shots=sum(counts.values()), counts=counts)


def merge_counts(parts: list[BitstringCounts]) -> BitstringCounts:
    """Pool several measurement records over the same register."""
    if not parts:
        raise ValueError("nothing to merge")
    widths = {p.n_qubits for p in parts}
    if len(widths) != 1:
        raise ValueError("register widths differ")
    total: Counter = Counter()
    for p in parts:
        total.update(p.counts)
    return BitstringCounts(n_qubits=widths.pop(),
                           shots=sum(p.shots for p in parts),
                           counts=dict(total))


@dataclass(frozen=True)
class NoiseSpec:
    """Symmetric per-bit readout flip model."""

    flip_prob: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.flip_prob <= 1.0:
            raise ValueError("flip probability must lie in [0, 1]")


def derive_seed(seed: int, *parts) -> int:
    """Stable child seed for a labelled parallel stream."""
    label = ",".join(str(p) for p in parts).encode()
    digest = hashlib.blake2b(label, digest_size=8).digest()
    return (seed ^ int.from_bytes(digest, "little")) & 0xFFFFFFFFFFFFFFFF


def sample_counts(state: StateVector, shots: int, seed: int) -> BitstringCounts:
    """Draw i.i.d. computational-basis measurements from the state."""
    if shots < 1:
        raise ValueError("shots must be positive")
    probs = state.probabilities()
    cdf = np.cumsum(probs)
    norm = cdf[-1]
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state norm deviates from 1: {norm}")
    rng = np.random.Generator(np.random.Philox(seed))
    draws = np.searchsorted(cdf, rng.random(shots) * norm, side="right")
    keys, reps = np.unique(draws, return_counts=True)
    counts = {int(k): int(v) for k, v in zip(keys, reps)}
    return BitstringCounts(n_qubits=state.n_qubits, shots=shots, counts=counts)


def inject_readout_noise(c: BitstringCounts, spec: NoiseSpec) -> BitstringCounts:
    """Flip each recorded bit independently with the given probability."""
    if spec.flip_prob == 0.0:
        return BitstringCounts(c.n_qubits, c.shots, dict(c.counts))
    rng = np.random.Generator(np.random.Philox(spec.seed))
    keys = np.fromiter(c.counts.keys(), dtype=np.uint64, count=len(c.counts))
    reps = np.fromiter(c.counts.values(), dtype=np.int64, count=len(c.counts))
    expanded = np.repeat(keys, reps)
    flips = rng.random((expanded.size, c.n_qubits)) < spec.flip_prob
    weights = (np.uint64(1) << np.arange(c.n_qubits, dtype=np.uint64))
    flip_masks = (flips * weights).sum(axis=1).astype(np.uint64)
    noisy = expanded ^ flip_masks
    out_keys, out_reps = np.unique(noisy, return_counts=True)
    counts = {int(k): int(v) for k, v in zip(out_keys, out_reps)}
    return BitstringCounts(n_qubits=c.n_qubits, shots=c.shots, counts=counts)


def hamming_weight_histogram(c: BitstringCounts) -> dict[int, int]:
    """Shot counts grouped by bitstring popcount."""
    hist: dict[int, int] = {}
    if not c.counts:
        return hist
    keys = np.fromiter(c.counts.keys(), dtype=np.uint64, count=len(c.counts))
    weights = popcount_array(keys)
    for w, k in zip(weights, keys):
        hist[int(w)] = hist.get(int(w), 0) + c.counts[int(k)]
    return dict(sorted(hist.items()))
