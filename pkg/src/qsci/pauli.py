"""Qubit Hamiltonians: Jordan-Wigner mapping, locality truncation, ordering.

Spin orbitals are interleaved on the register (qubit 2p = alpha of spatial
orbital p, qubit 2p+1 = beta), which keeps same-orbital pairs adjacent and
the antisymmetrization Z-chains short for spatially local orbitals.

A Pauli string is stored as an (x_mask, z_mask) pair; qubit q carries X if
only the x bit is set, Z if only the z bit, and Y if both.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from ._bits import sign_array
from .integrals import MolecularIntegrals

__all__ = [
    "PauliString",
    "PauliSum",
    "jordan_wigner",
    "pauli_locality",
    "truncate_by_locality",
    "order_terms",
    "matrix_in_basis",
]

WEIGHT_PRUNE_TOL = 1e-12
_AXES = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1), "I": (0, 0)}
_DENSE_QUBIT_LIMIT = 14


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Pauli operators on an n-qubit register."""

    n_qubits: int
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self):
        limit = 1 << self.n_qubits
        if self.x_mask >= limit or self.z_mask >= limit or self.x_mask < 0 or self.z_mask < 0:
            raise ValueError("mask refers to qubits outside the register")

    @classmethod
    def from_ops(cls, n_qubits: int, ops: Mapping[int, str] | str) -> "PauliString":
        """Build from a {qubit: axis} map or an axis string (qubit 0 first)."""
        if isinstance(ops, str):
            ops = {q: ax for q, ax in enumerate(ops) if ax != "I"}
        x = z = 0
        for q, ax in ops.items():
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit {q} outside register of width {n_qubits}")
            try:
                xb, zb = _AXES[ax.upper()]
            except KeyError:
                raise ValueError(f"unknown Pauli axis {ax!r}") from None
            x |= xb << q
            z |= zb << q
        return cls(n_qubits, x, z)

    @property
    def ops(self) -> dict[int, str]:
        """Sparse {qubit: axis} view (identity positions omitted)."""
        out = {}
        support = self.x_mask | self.z_mask
        q = 0
        while support >> q:
            bit = 1 << q
            if support & bit:
                xb, zb = bool(self.x_mask & bit), bool(self.z_mask & bit)
                out[q] = "Y" if (xb and zb) else ("X" if xb else "Z")
            q += 1
        return out

    @property
    def locality(self) -> int:
        """Number of non-identity tensor factors."""
        return (self.x_mask | self.z_mask).bit_count()

    @property
    def n_y(self) -> int:
        return (self.x_mask & self.z_mask).bit_count()

    def axis_string(self) -> str:
        ops = self.ops
        return "".join(ops.get(q, "I") for q in range(self.n_qubits))

    def __str__(self) -> str:
        return self.axis_string()


def pauli_locality(s: PauliString) -> int:
    """Count of non-identity Pauli factors in the string."""
    return s.locality


class PauliSum:
    """Real-weighted, merged collection of Pauli strings (a qubit Hamiltonian).

    Terms with equal strings are merged on construction and weights below
    ``WEIGHT_PRUNE_TOL`` are pruned, so the term list is canonical. When
    built from molecular integrals, each term remembers the rank of the
    first integral entry that produced it, which supports the
    integral-lexicographic Trotter ordering.
    """

    def __init__(self, n_qubits: int, terms: Iterable[tuple[float, PauliString]] = (),
                 _ranks: Sequence[int] | None = None):
        self.n_qubits = n_qubits
        merged: dict[tuple[int, int], float] = {}
        ranks: dict[tuple[int, int], int] = {}
        for pos, (w, s) in enumerate(terms):
            if s.n_qubits != n_qubits:
                raise ValueError("term register width mismatch")
            if abs(complex(w).imag) > WEIGHT_PRUNE_TOL:
                raise ValueError(f"non-real weight {w!r} (Hamiltonian must be Hermitian)")
            key = (s.x_mask, s.z_mask)
            merged[key] = merged.get(key, 0.0) + float(complex(w).real)
            if _ranks is not None and key not in ranks:
                ranks[key] = _ranks[pos]
        self._weights: list[float] = []
        self._strings: list[PauliString] = []
        self._ranks: list[int] | None = [] if _ranks is not None else None
        for key, w in merged.items():
            if abs(w) <= WEIGHT_PRUNE_TOL:
                continue
            self._weights.append(w)
            self._strings.append(PauliString(n_qubits, *key))
            if self._ranks is not None:
                self._ranks.append(ranks[key])

    @property
    def terms(self) -> list[tuple[float, PauliString]]:
        return list(zip(self._weights, self._strings))

    def __len__(self) -> int:
        return len(self._weights)

    def __iter__(self) -> Iterator[tuple[float, PauliString]]:
        return iter(self.terms)

    @property
    def weights(self) -> np.ndarray:
        return np.array(self._weights)

    def weight_of(self, s: PauliString) -> float:
        key = (s.x_mask, s.z_mask)
        for w, t in zip(self._weights, self._strings):
            if (t.x_mask, t.z_mask) == key:
                return w
        return 0.0

    def to_matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix; guarded to small registers."""
        if self.n_qubits > _DENSE_QUBIT_LIMIT:
            raise ValueError(f"dense matrix limited to {_DENSE_QUBIT_LIMIT} qubits")
        dim = 1 << self.n_qubits
        idx = np.arange(dim, dtype=np.uint64)
        mat = np.zeros((dim, dim), dtype=complex)
        for w, s in zip(self._weights, self._strings):
            rows = idx ^ np.uint64(s.x_mask)
            phase = (1j ** s.n_y) * sign_array(idx & np.uint64(s.z_mask))
            mat[rows, idx] += w * phase
        return mat

    def to_text(self) -> str:
        """One term per line: weight then the per-qubit axes, qubit 0 first."""
        lines = []
        for w, s in sorted(zip(self._weights, self._strings),
                           key=lambda ws: ws[1].axis_string()):
            lines.append(f"{w!r} " + " ".join(s.axis_string()))
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Second-quantized term enumeration and the Jordan-Wigner map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _SqTerm:
    """One term of the second-quantized Hamiltonian (spin-orbital indices).

    ``ladders`` lists (spin_orbital, is_creation) left to right; ``rank``
    is the position in the integral-lexicographic enumeration.
    """

    rank: int
    coeff: float
    ladders: tuple[tuple[int, bool], ...]


def _enumerate_sq_terms(ints: MolecularIntegrals) -> Iterator[_SqTerm]:
    """Yield the Hamiltonian terms in integral-lexicographic order.

    One-electron entries h_pq are scanned with q varying fastest, then the
    two-electron entries with index nesting p, r, q, s over the chemists'
    integral (pr|qs); each spatial entry fans out over its spin assignments.
    The number of yielded terms is what the truncation report counts.
    """
    n = ints.n_orb
    h, g = ints.h, ints.g
    rank = 0
    for p in range(n):
        for q in range(n):
            if h[p, q] == 0.0:
                continue
            for spin in (0, 1):
                yield _SqTerm(rank, h[p, q],
                              ((2 * p + spin, True), (2 * q + spin, False)))
                rank += 1
    for p in range(n):
        for r in range(n):
            for q in range(n):
                for s in range(n):
                    val = g[p, r, q, s]
                    if val == 0.0:
                        continue
                    for sp in (0, 1):
                        for tau in (0, 1):
                            yield _SqTerm(rank, 0.5 * val,
                                          ((2 * p + sp, True), (2 * q + tau, True),
                                           (2 * s + tau, False), (2 * r + sp, False)))
                            rank += 1


def _ladder_xz(so: int, creation: bool) -> tuple[tuple[complex, int, int], ...]:
    """JWT image of a ladder operator as (coeff, x_mask, z_mask) pairs.

    Masks are in the X^x Z^z product convention (Y = i X Z rolled into the
    coefficient at finalization).
    """
    chain = (1 << so) - 1
    site = 1 << so
    sign = 0.5 if creation else -0.5
    return ((0.5, site, chain), (sign, site, chain | site))


def _term_to_xz(term: _SqTerm) -> dict[tuple[int, int], complex]:
    """Multiply out a ladder-operator product into X^x Z^z components."""
    acc: dict[tuple[int, int], complex] = {(0, 0): complex(term.coeff)}
    for so, creation in term.ladders:
        nxt: dict[tuple[int, int], complex] = {}
        for (x1, z1), c1 in acc.items():
            for c2, x2, z2 in _ladder_xz(so, creation):
                phase = -1.0 if (z1 & x2).bit_count() & 1 else 1.0
                key = (x1 ^ x2, z1 ^ z2)
                nxt[key] = nxt.get(key, 0.0) + c1 * c2 * phase
        acc = {k: v for k, v in nxt.items() if v != 0.0}
    return acc


def _xz_to_pauli(coeff: complex, x: int, z: int) -> complex:
    """Coefficient of the honest Pauli string for an X^x Z^z component."""
    return coeff * (-1j) ** ((x & z).bit_count())


def _term_pauli_components(term: _SqTerm) -> list[tuple[complex, int, int]]:
    return [(_xz_to_pauli(c, x, z), x, z) for (x, z), c in _term_to_xz(term).items()]


def _term_max_locality(term: _SqTerm) -> int:
    comps = [(x | z).bit_count() for c, x, z in _term_pauli_components(term)
             if abs(c) > WEIGHT_PRUNE_TOL]
    return max(comps, default=0)


def _assemble(ints: MolecularIntegrals, max_locality: int | None) -> tuple[PauliSum, int]:
    n_qubits = ints.n_qubits
    acc: dict[tuple[int, int], complex] = {(0, 0): complex(ints.core_energy)}
    rank_of: dict[tuple[int, int], int] = {(0, 0): -1}
    kept = 0
    for term in _enumerate_sq_terms(ints):
        comps = _term_pauli_components(term)
        if max_locality is not None:
            loc = max(((x | z).bit_count() for c, x, z in comps
                       if abs(c) > WEIGHT_PRUNE_TOL), default=0)
            if loc > max_locality:
                continue
        kept += 1
        for c, x, z in comps:
            key = (x, z)
            acc[key] = acc.get(key, 0.0) + c
            rank_of.setdefault(key, term.rank)
    weights, strings, ranks = [], [], []
    for (x, z), c in acc.items():
        if abs(c) <= WEIGHT_PRUNE_TOL:
            continue
        if abs(c.imag) > 1e-9:
            raise AssertionError(f"non-Hermitian accumulation: {c!r} on ({x:#x},{z:#x})")
        weights.append(c.real)
        strings.append(PauliString(n_qubits, x, z))
        ranks.append(rank_of[(x, z)])
    return PauliSum(n_qubits, zip(weights, strings), _ranks=ranks), kept


def jordan_wigner(ints: MolecularIntegrals) -> PauliSum:
    """Map the molecular Hamiltonian onto the qubit register.

    The identity term carries the core energy plus the constants produced
    by the mapping; all weights are real.
    """
    return _assemble(ints, None)[0]


def truncate_by_locality(ints: MolecularIntegrals, m: int) -> tuple[PauliSum, int]:
    """Drop whole second-quantized terms whose Pauli image exceeds locality m.

    A term is kept iff the maximal locality over every Pauli string it
    generates is at most ``m``; keeping or dropping whole terms (which tie
    Hermitian partners together) preserves Hermiticity and particle-number
    conservation. Returns the truncated Hamiltonian and the count of
    retained second-quantized terms (the core-energy constant is not a
    counted term).
    """
    if not 0 <= m <= ints.n_qubits:
        raise ValueError(f"locality threshold {m} outside [0, {ints.n_qubits}]")
    return _assemble(ints, m)


def count_sq_terms(ints: MolecularIntegrals) -> int:
    """Total number of second-quantized Hamiltonian terms before truncation."""
    return sum(1 for _ in _enumerate_sq_terms(ints))


# ---------------------------------------------------------------------------
# Term ordering for Trotterization
# ---------------------------------------------------------------------------

ORDERING_SCHEMES = ("magnitude", "integral-lexicographic")


def order_terms(h: PauliSum, scheme: str = "magnitude") -> list[tuple[float, PauliString]]:
    """Return the Hamiltonian terms in the requested Trotter order.

    ``magnitude`` sorts by descending |weight| with a deterministic
    tie-break on the axis-string encoding. ``integral-lexicographic``
    replays the order in which the generating integral entries were
    scanned and requires a PauliSum built from integrals.
    """
    if scheme == "magnitude":
        pairs = sorted(zip(h._weights, h._strings),
                       key=lambda ws: (-abs(ws[0]), ws[1].axis_string()))
        return [(w, s) for w, s in pairs]
    if scheme == "integral-lexicographic":
        if h._ranks is None:
            raise ValueError("integral-lexicographic ordering needs a Hamiltonian "
                             "built from molecular integrals")
        order = sorted(range(len(h)), key=lambda i: (h._ranks[i],
                                                     h._strings[i].axis_string()))
        return [(h._weights[i], h._strings[i]) for i in order]
    raise ValueError(f"unknown ordering scheme {scheme!r}; pick from {ORDERING_SCHEMES}")


# ---------------------------------------------------------------------------
# Matrix realizations
# ---------------------------------------------------------------------------

def matrix_in_basis(h: PauliSum, basis_states: Sequence[int]) -> np.ndarray:
    """Dense matrix of the PauliSum projected onto given basis states.

    ``basis_states`` are computational-basis indices; images falling
    outside the list are dropped (projection). For a particle-number
    sector basis and a number-conserving Hamiltonian nothing is dropped,
    so this realizes the sector-restricted dense matrix.
    """
    states = np.asarray(basis_states, dtype=np.uint64)
    n = len(states)
    if n == 0:
        raise ValueError("empty basis")
    order = np.argsort(states, kind="stable")
    sorted_states = states[order]
    mat = np.zeros((n, n), dtype=complex)
    cols = np.arange(n)
    for w, s in zip(h._weights, h._strings):
        images = states ^ np.uint64(s.x_mask)
        pos = np.searchsorted(sorted_states, images)
        pos[pos >= n] = n - 1
        hit = sorted_states[pos] == images
        rows = order[pos[hit]]
        phase = (1j ** s.n_y) * sign_array(states[hit] & np.uint64(s.z_mask))
        mat[rows, cols[hit]] += w * phase
    if np.abs(mat.imag).max(initial=0.0) < 1e-12:
        return np.ascontiguousarray(mat.real)
    return mat
