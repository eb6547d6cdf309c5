"""Exact dense statevector engine for the qubit register.

Amplitudes are indexed so that bit q of the basis index is the occupation
of qubit q (qubit 0 least significant). Evolution is first-order Trotter:
one exponential per Hamiltonian term, applied in the caller-chosen order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._bits import sign_array
from .determinants import Determinant
from .pauli import PauliString, PauliSum

__all__ = [
    "StateVector",
    "EvolutionParams",
    "prepare_determinant_state",
    "prepare_superposition_state",
    "apply_pauli_exponential",
    "trotter_step",
    "evolve_k_steps",
    "expectation_value",
    "state_fidelity",
]

NORM_TOL = 1e-10
MAX_QUBITS = 24  # 2**24 complex doubles = 256 MiB, the hard desk-scale ceiling

_INDEX_CACHE: dict[int, np.ndarray] = {}


def _indices(n_qubits: int) -> np.ndarray:
    arr = _INDEX_CACHE.get(n_qubits)
    if arr is None:
        arr = np.arange(1 << n_qubits, dtype=np.uint64)
        arr.flags.writeable = False
        _INDEX_CACHE[n_qubits] = arr
    return arr


@dataclass
class StateVector:
    amps: np.ndarray
    n_qubits: int

    def __post_init__(self):
        if self.n_qubits > MAX_QUBITS:
            raise ValueError(f"register width {self.n_qubits} exceeds the "
                             f"{MAX_QUBITS}-qubit ceiling")
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude array length is not 2**n_qubits")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.amps.copy(), self.n_qubits)

    def to_bytes(self) -> bytes:
        """Little-endian dump: 8-byte qubit count, then (real, imag) pairs."""
        header = int(self.n_qubits).to_bytes(8, "little")
        pairs = np.empty((len(self.amps), 2))
        pairs[:, 0] = self.amps.real
        pairs[:, 1] = self.amps.imag
        return header + pairs.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "StateVector":
        n = int.from_bytes(blob[:8], "little")
        pairs = np.frombuffer(blob[8:], dtype="<f8").reshape(-1, 2)
        return cls(pairs[:, 0] + 1j * pairs[:, 1], n)


@dataclass(frozen=True)
class EvolutionParams:
    """Trotter schedule: step length (atomic units), step count, term order."""

    dt: float = 1.0
    k_max: int = 10
    ordering: str = "magnitude"

    def __post_init__(self):
        if self.dt < 0:
            raise ValueError("dt must be non-negative")
        if self.k_max < 0:
            raise ValueError("k_max must be non-negative")


def prepare_determinant_state(d: Determinant, n_qubits: int) -> StateVector:
    """Computational-basis state encoding one determinant."""
    index = d.to_basis_index()
    if index >= 1 << n_qubits:
        raise ValueError("determinant does not fit the register")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps, n_qubits)


def prepare_superposition_state(terms: Sequence[tuple[float | complex, Determinant]],
                                n_qubits: int) -> StateVector:
    """Normalized superposition of determinant basis states."""
    if not terms:
        raise ValueError("no superposition terms given")
    dets = [d for _, d in terms]
    if len(set(dets)) != len(dets):
        raise ValueError("duplicate determinants in superposition")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    for coeff, d in terms:
        index = d.to_basis_index()
        if index >= 1 << n_qubits:
            raise ValueError("determinant does not fit the register")
        amps[index] = coeff
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise ValueError("all superposition coefficients are zero")
    amps /= norm
    return StateVector(amps, n_qubits)


def _apply_exponential_inplace(amps: np.ndarray, s: PauliString, theta: float) -> None:
    if theta == 0.0:
        return
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    idx = _indices(s.n_qubits)
    if s.x_mask == 0:
        # diagonal string: pure phase per basis state
        if s.z_mask == 0:
            amps *= complex(cos_t, -sin_t)
            return
        sgn = sign_array(idx & np.uint64(s.z_mask))
        amps *= np.exp(-1j * theta * sgn)
        return
    src = idx ^ np.uint64(s.x_mask)
    flipped = amps[src]
    if s.z_mask:
        flipped = flipped * sign_array(src & np.uint64(s.z_mask))
    prefactor = (-1j * sin_t) * (1j ** s.n_y)
    amps *= cos_t
    amps += prefactor * flipped


def apply_pauli_exponential(state: StateVector, s: PauliString, theta: float) -> StateVector:
    """exp(-i theta P) applied to the state; norm preserving."""
    if s.n_qubits != state.n_qubits:
        raise ValueError("Pauli string width does not match the register")
    out = state.amps.copy()
    _apply_exponential_inplace(out, s, theta)
    return StateVector(out, state.n_qubits)


def trotter_step(state: StateVector,
                 ordered_terms: Sequence[tuple[float, PauliString]],
                 dt: float) -> StateVector:
    """One first-order Trotter step: sequential per-term exponentials.

    The rotation angle of term j is weight_j * dt; an identity term
    contributes the global phase exp(-i w dt).
    """
    out = state.amps.copy()
    for w, s in ordered_terms:
        _apply_exponential_inplace(out, s, w * dt)
    return StateVector(out, state.n_qubits)


def evolve_k_steps(state0: StateVector,
                   ordered_terms: Sequence[tuple[float, PauliString]],
                   params: EvolutionParams) -> list[StateVector]:
    """States after 1..k_max Trotter steps (the input state is not mutated)."""
    out: list[StateVector] = []
    amps = state0.amps.copy()
    for _ in range(params.k_max):
        for w, s in ordered_terms:
            _apply_exponential_inplace(amps, s, w * params.dt)
        out.append(StateVector(amps.copy(), state0.n_qubits))
    return out


def expectation_value(state: StateVector, h: PauliSum) -> float:
    """<state|H|state>; the imaginary remnant must vanish and is discarded."""
    if h.n_qubits != state.n_qubits:
        raise ValueError("Hamiltonian width does not match the register")
    amps = state.amps
    idx = _indices(state.n_qubits)
    total = 0.0 + 0.0j
    for w, s in h:
        src = idx ^ np.uint64(s.x_mask)
        applied = amps[src]
        if s.z_mask:
            applied = applied * sign_array(src & np.uint64(s.z_mask))
        total += w * (1j ** s.n_y) * np.vdot(amps, applied)
    if abs(total.imag) > 1e-10:
        raise AssertionError(f"non-real expectation value {total!r}")
    return float(total.real)


def state_fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("register widths differ")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)
