"""Slater determinants as spin-resolved occupation bitmasks.

Bit p of each mask marks spatial orbital p as occupied. The text form used
in files is ``alpha_bits beta_bits`` with orbital 0 rightmost, matching the
computational-basis convention (qubit 0 least significant).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

import numpy as np

from ._bits import compress_even_bits, iter_bits, spread_bits

__all__ = ["Determinant", "DeterminantSet", "OccupationVector", "determinant_from_bitstring"]


@dataclass(frozen=True, order=True)
class Determinant:
    alpha_mask: int
    beta_mask: int

    @property
    def n_alpha(self) -> int:
        return self.alpha_mask.bit_count()

    @property
    def n_beta(self) -> int:
        return self.beta_mask.bit_count()

    @property
    def open_mask(self) -> int:
        """Singly occupied spatial orbitals."""
        return self.alpha_mask ^ self.beta_mask

    @property
    def closed_mask(self) -> int:
        """Doubly occupied spatial orbitals."""
        return self.alpha_mask & self.beta_mask

    def alpha_list(self) -> list[int]:
        return list(iter_bits(self.alpha_mask))

    def beta_list(self) -> list[int]:
        return list(iter_bits(self.beta_mask))

    def to_basis_index(self) -> int:
        """Computational-basis index under the interleaved qubit ordering."""
        return spread_bits(self.alpha_mask) | (spread_bits(self.beta_mask) << 1)

    @classmethod
    def from_basis_index(cls, index: int) -> "Determinant":
        return cls(compress_even_bits(index), compress_even_bits(index >> 1))

    def to_text(self, n_orb: int) -> str:
        return f"{self.alpha_mask:0{n_orb}b} {self.beta_mask:0{n_orb}b}"

    @classmethod
    def from_text(cls, text: str) -> "Determinant":
        alpha, beta = text.split()
        return cls(int(alpha, 2), int(beta, 2))

    def excitation_degree(self, other: "Determinant") -> int:
        return ((self.alpha_mask ^ other.alpha_mask).bit_count()
                + (self.beta_mask ^ other.beta_mask).bit_count()) // 2


def determinant_from_bitstring(bits: int | str, n_qubits: int | None = None) -> Determinant:
    """Decode a computational-basis measurement into a determinant.

    Even qubits populate the alpha mask, odd qubits the beta mask. A string
    argument is read with qubit 0 rightmost; the register width must be even.
    """
    if isinstance(bits, str):
        if n_qubits is None:
            n_qubits = len(bits)
        elif n_qubits != len(bits):
            raise ValueError("bitstring length does not match register width")
        bits = int(bits, 2)
    if n_qubits is None or n_qubits % 2 != 0:
        raise ValueError("register width must be even (alpha/beta interleaved)")
    if bits >= 1 << n_qubits:
        raise ValueError("bitstring wider than the register")
    return Determinant.from_basis_index(bits)


class DeterminantSet:
    """Ordered, deduplicated collection of determinants."""

    def __init__(self, dets: Iterable[Determinant] = ()):
        self._dets: list[Determinant] = []
        self._seen: set[Determinant] = set()
        for d in dets:
            self.add(d)

    def add(self, d: Determinant) -> bool:
        if d in self._seen:
            return False
        self._seen.add(d)
        self._dets.append(d)
        return True

    def update(self, dets: Iterable[Determinant]) -> None:
        for d in dets:
            self.add(d)

    @property
    def dets(self) -> tuple[Determinant, ...]:
        return tuple(self._dets)

    def __len__(self) -> int:
        return len(self._dets)

    def __iter__(self) -> Iterator[Determinant]:
        return iter(self._dets)

    def __contains__(self, d: Determinant) -> bool:
        return d in self._seen

    def __getitem__(self, i: int) -> Determinant:
        return self._dets[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DeterminantSet):
            return NotImplemented
        return self._seen == other._seen

    def copy(self) -> "DeterminantSet":
        return DeterminantSet(self._dets)

    def sector(self) -> tuple[int, int]:
        """The common (n_alpha, n_beta); raises if members disagree."""
        if not self._dets:
            raise ValueError("empty determinant set has no sector")
        sectors = {(d.n_alpha, d.n_beta) for d in self._dets}
        if len(sectors) != 1:
            raise ValueError(f"non-uniform particle numbers: {sorted(sectors)}")
        return sectors.pop()

    def basis_indices(self) -> np.ndarray:
        return np.array([d.to_basis_index() for d in self._dets], dtype=np.uint64)

    def to_lines(self, n_orb: int) -> str:
        return "\n".join(d.to_text(n_orb) for d in self._dets) + "\n"

    @classmethod
    def from_lines(cls, text: str) -> "DeterminantSet":
        return cls(Determinant.from_text(line) for line in text.splitlines() if line.strip())

    def __repr__(self) -> str:
        return f"DeterminantSet({len(self)} determinants)"


@dataclass(frozen=True)
class OccupationVector:
    """Per-orbital average occupation numbers of a reference CI state."""

    occ_alpha: np.ndarray
    occ_beta: np.ndarray

    def __post_init__(self):
        for arr in (self.occ_alpha, self.occ_beta):
            if np.any(arr < -1e-9) or np.any(arr > 1 + 1e-9):
                raise ValueError("occupation numbers must lie in [0, 1]")

    @classmethod
    def from_determinants(cls, dets: Iterable[Determinant], n_orb: int,
                          weights: Iterable[float] | None = None) -> "OccupationVector":
        """Average occupancies of a (weighted) determinant collection."""
        dets = list(dets)
        if weights is None:
            weights = [1.0] * len(dets)
        weights = np.asarray(list(weights), dtype=float)
        weights = weights / weights.sum()
        occ_a = np.zeros(n_orb)
        occ_b = np.zeros(n_orb)
        for w, d in zip(weights, dets):
            for p in iter_bits(d.alpha_mask):
                occ_a[p] += w
            for p in iter_bits(d.beta_mask):
                occ_b[p] += w
        return cls(occ_a, occ_b)


def spin_companions(d: Determinant) -> list[Determinant]:
    """All determinants sharing d's closed shell and open-shell orbital set.

    The open-shell spins are permuted over the singly occupied orbitals
    holding the (open-alpha, open-beta) counts fixed; the input determinant
    is included.
    """
    open_positions = list(iter_bits(d.open_mask))
    n_open_alpha = (d.alpha_mask & d.open_mask).bit_count()
    closed = d.closed_mask
    out = []
    for subset in combinations(open_positions, n_open_alpha):
        alpha_open = 0
        for p in subset:
            alpha_open |= 1 << p
        beta_open = d.open_mask ^ alpha_open
        out.append(Determinant(closed | alpha_open, closed | beta_open))
    return out
