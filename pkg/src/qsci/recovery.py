"""Turning raw bitstring counts into a symmetry-respecting determinant set.

Three stages: drop or repair strings with wrong particle numbers, then
augment the surviving determinants with the open-shell spin permutations
needed to span spin eigenfunctions.
"""

from __future__ import annotations

import numpy as np

from ._bits import compress_even_bits, iter_bits
from .determinants import Determinant, DeterminantSet, OccupationVector, spin_companions
from .sampler import BitstringCounts

__all__ = [
    "filter_by_particle_number",
    "sccr_pass",
    "spin_complete",
]


def _split_sectors(key: int) -> tuple[int, int]:
    return compress_even_bits(key), compress_even_bits(key >> 1)


def filter_by_particle_number(c: BitstringCounts, n_alpha: int,
                              n_beta: int) -> DeterminantSet:
    """Keep strings whose alpha/beta popcounts match the target sector."""
    out = DeterminantSet()
    for key in c.counts:
        alpha, beta = _split_sectors(key)
        if alpha.bit_count() == n_alpha and beta.bit_count() == n_beta:
            out.add(Determinant(alpha, beta))
    return out


def retained_shots(c: BitstringCounts, n_alpha: int, n_beta: int) -> int:
    """Number of shots that survive plain particle-number filtering."""
    total = 0
    for key, cnt in c.counts.items():
        alpha, beta = _split_sectors(key)
        if alpha.bit_count() == n_alpha and beta.bit_count() == n_beta:
            total += cnt
    return total


def _repair_sector(mask: int, target: int, occ: np.ndarray, n_orb: int,
                   rng: np.random.Generator) -> int:
    """Flip bits until the sector popcount matches the target.

    Deficient sectors turn on empty orbitals with probability proportional
    to the reference occupation; surplus sectors turn off occupied ones
    with probability proportional to the reference hole density. Candidates
    are drawn without replacement; a zero-weight candidate pool falls back
    to uniform.
    """
    current = mask.bit_count()
    while current != target:
        if current < target:
            candidates = [p for p in range(n_orb) if not mask & (1 << p)]
            weights = [occ[p] for p in candidates]
        else:
            candidates = list(iter_bits(mask))
            weights = [1.0 - occ[p] for p in candidates]
        cdf = np.cumsum(np.clip(weights, 0.0, None))
        total = cdf[-1]
        if total <= 0.0:
            pick = candidates[int(rng.integers(len(candidates)))]
        else:
            pick = candidates[int(np.searchsorted(cdf, rng.random() * total, side="right"))]
        mask ^= 1 << pick
        current = mask.bit_count()
    return mask


def _repair_sector_batch(mask: int, target: int, occ: np.ndarray, n_orb: int,
                         cnt: int, rng: np.random.Generator) -> np.ndarray:
    """Independent repairs of ``cnt`` occurrences of one sector string."""
    delta = target - mask.bit_count()
    if delta == 0:
        return np.full(cnt, mask, dtype=np.uint64)
    if abs(delta) == 1:
        # single flip: one categorical draw per occurrence
        if delta > 0:
            candidates = [p for p in range(n_orb) if not mask & (1 << p)]
            weights = np.array([occ[p] for p in candidates])
        else:
            candidates = list(iter_bits(mask))
            weights = np.array([1.0 - occ[p] for p in candidates])
        cdf = np.cumsum(np.clip(weights, 0.0, None))
        total = cdf[-1]
        if total <= 0.0:
            picks = rng.integers(len(candidates), size=cnt)
        else:
            picks = np.searchsorted(cdf, rng.random(cnt) * total, side="right")
        bits = np.array([np.uint64(1 << p) for p in candidates])
        return np.uint64(mask) ^ bits[picks]
    return np.array(
        [_repair_sector(mask, target, occ, n_orb, rng) for _ in range(cnt)],
        dtype=np.uint64)


def sccr_pass(c: BitstringCounts, n_alpha: int, n_beta: int,
              occ: OccupationVector, seed: int) -> DeterminantSet:
    """One configuration-recovery sweep over the measured strings.

    Strings with correct per-sector popcounts pass through unchanged; every
    occurrence of a wrong-count string is repaired independently by flipping
    bits toward the target counts, guided by the reference occupations. The
    output is deduplicated and guaranteed to carry the requested sector.
    """
    n_orb = c.n_qubits // 2
    if n_alpha > n_orb or n_beta > n_orb:
        raise ValueError("target electron counts exceed the orbital count")
    rng = np.random.Generator(np.random.Philox(seed))
    out = DeterminantSet()
    for key in sorted(c.counts):
        cnt = c.counts[key]
        alpha, beta = _split_sectors(key)
        if alpha.bit_count() == n_alpha and beta.bit_count() == n_beta:
            out.add(Determinant(alpha, beta))
            continue
        a_fixed = _repair_sector_batch(alpha, n_alpha, occ.occ_alpha, n_orb, cnt, rng)
        b_fixed = _repair_sector_batch(beta, n_beta, occ.occ_beta, n_orb, cnt, rng)
        for a, b in sorted({(int(a), int(b)) for a, b in zip(a_fixed, b_fixed)}):
            out.add(Determinant(a, b))
    return out


def spin_complete(dets: DeterminantSet) -> DeterminantSet:
    """Close the set under open-shell spin permutations.

    Every member contributes all determinants reachable by redistributing
    its open-shell spins over its singly occupied orbitals (open-alpha and
    open-beta counts fixed). Closed-shell members are untouched; the
    operation is idempotent and monotone.
    """
    if len(dets):
        dets.sector()
    out = DeterminantSet(dets)
    for d in dets:
        if d.open_mask == 0:
            continue
        out.update(spin_companions(d))
    return out
