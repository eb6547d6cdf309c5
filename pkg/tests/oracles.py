"""Independent dense oracles for cross-checking the production code paths.

Everything here is intentionally brute force: ladder operators as explicit
kron-chain matrices, Hamiltonians assembled by direct operator application,
and Pauli decompositions by trace projection. Slow and obviously correct.
"""

from __future__ import annotations

import numpy as np

from qsci.integrals import MolecularIntegrals

SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
SPLUS = np.array([[0.0, 0.0], [1.0, 0.0]])  # |1><0| on one qubit


def dense_creation_ops(n_modes: int) -> list[np.ndarray]:
    """Fermionic creation operators on a register with mode 0 least significant."""
    ops = []
    for q in range(n_modes):
        m = np.kron(np.eye(1 << (n_modes - 1 - q)), np.kron(SPLUS, np.eye(1 << q)))
        for k in range(q):
            zk = np.kron(np.eye(1 << (n_modes - 1 - k)), np.kron(SZ, np.eye(1 << k)))
            m = m @ zk
        ops.append(m)
    return ops


def _assemble(ints: MolecularIntegrals, so_index) -> np.ndarray:
    n = ints.n_orb
    adag = dense_creation_ops(2 * n)
    a = [m.T for m in adag]
    dim = 1 << (2 * n)
    H = np.eye(dim) * ints.core_energy
    for p in range(n):
        for q in range(n):
            if ints.h[p, q] == 0.0:
                continue
            for s in (0, 1):
                H = H + ints.h[p, q] * adag[so_index(p, s)] @ a[so_index(q, s)]
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for t in range(n):
                    val = ints.g[p, q, r, t]
                    if val == 0.0:
                        continue
                    for s1 in (0, 1):
                        for s2 in (0, 1):
                            H = H + 0.5 * val * (adag[so_index(p, s1)]
                                                 @ adag[so_index(r, s2)]
                                                 @ a[so_index(t, s2)]
                                                 @ a[so_index(q, s1)])
    return H


def fock_matrix_interleaved(ints: MolecularIntegrals) -> np.ndarray:
    """Dense Hamiltonian with spin orbitals interleaved (alpha of p at 2p)."""
    return _assemble(ints, lambda p, s: 2 * p + s)


def fock_matrix_blocked(ints: MolecularIntegrals) -> np.ndarray:
    """Dense Hamiltonian with the alpha block first (alpha of p at p)."""
    return _assemble(ints, lambda p, s: p + s * ints.n_orb)


def blocked_index(d) -> int:
    """Fock basis index of a determinant under the blocked ordering."""
    n_orb = max(d.alpha_mask.bit_length(), d.beta_mask.bit_length(), 1)
    return d.alpha_mask | (d.beta_mask << n_orb)


def pauli_decompose(mat: np.ndarray, n_qubits: int,
                    tol: float = 1e-12) -> dict[str, complex]:
    """Expansion coefficients over the Pauli basis by trace projection."""
    paulis = {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    }
    out: dict[str, complex] = {}
    dim = 1 << n_qubits
    from itertools import product

    for axes in product("IXYZ", repeat=n_qubits):
        # axes[q] acts on qubit q; qubit 0 is the least significant bit
        full = np.eye(1, dtype=complex)
        for q in range(n_qubits - 1, -1, -1):
            full = np.kron(full, paulis[axes[q]])
        coeff = np.trace(full.conj().T @ mat) / dim
        if abs(coeff) > tol:
            out["".join(axes)] = coeff
    return out


def random_symmetric_integrals(n_orb: int, n_alpha: int, n_beta: int,
                               seed: int) -> MolecularIntegrals:
    """Dense random integrals with exact h/g permutational symmetry."""
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(n_orb, n_orb))
    h = 0.5 * (h + h.T)
    g = rng.normal(size=(n_orb,) * 4)
    g = (g + g.transpose(1, 0, 2, 3) + g.transpose(0, 1, 3, 2)
         + g.transpose(1, 0, 3, 2) + g.transpose(2, 3, 0, 1)
         + g.transpose(2, 3, 1, 0) + g.transpose(3, 2, 0, 1)
         + g.transpose(3, 2, 1, 0)) / 8.0
    return MolecularIntegrals(n_orb, n_alpha, n_beta, float(rng.normal()), h, g)


def toy_two_orbital_integrals() -> MolecularIntegrals:
    """Hand-built (2e,2o) system with a handful of nonzero integrals."""
    h = np.array([[-1.25, 0.15], [0.15, -0.45]])
    g = np.zeros((2, 2, 2, 2))
    entries = {
        (0, 0, 0, 0): 0.65,
        (1, 1, 1, 1): 0.60,
        (0, 0, 1, 1): 0.45,
        (0, 1, 0, 1): 0.18,
        (0, 0, 0, 1): 0.05,
    }
    for (p, q, r, s), val in entries.items():
        for a, b in ((p, q), (q, p)):
            for c, d in ((r, s), (s, r)):
                g[a, b, c, d] = val
                g[c, d, a, b] = val
    return MolecularIntegrals(2, 1, 1, 0.31, h, g)
