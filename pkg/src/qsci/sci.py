"""Selected-CI core: matrix elements, subspace assembly, diagonalization.

Matrix elements follow the Slater-Condon rules with the fermionic phase
counted in the canonical spin-orbital ordering: alpha block ascending,
then beta block ascending. Two-electron integrals are chemists' (ij|kl).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.linalg
import scipy.sparse

from ._bits import bits_between, iter_bits
from .determinants import Determinant, DeterminantSet, OccupationVector
from .integrals import MolecularIntegrals

__all__ = [
    "SubspaceHamiltonian",
    "CIResult",
    "DavidsonError",
    "slater_condon_element",
    "determinant_irrep",
    "build_subspace_matrix",
    "diagonalize_subspace",
    "enumerate_cas_determinants",
    "casci_ground_state",
    "s_squared_expectation",
    "orbital_occupations",
    "hartree_fock_determinant",
]

DENSE_BACKEND_LIMIT = 2000
DAVIDSON_TOL = 1e-8
DAVIDSON_MAX_SUBSPACE = 20
DAVIDSON_MAX_ITER = 200


class DavidsonError(RuntimeError):
    """Davidson failed to converge; carries the final residual norms."""

    def __init__(self, message: str, residuals: np.ndarray):
        super().__init__(message)
        self.residuals = residuals


@dataclass
class SubspaceHamiltonian:
    basis: DeterminantSet
    matrix: scipy.sparse.csr_matrix
    n_orb: int

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass
class CIResult:
    energy: float
    coefficients: np.ndarray
    basis: DeterminantSet
    n_orb: int

    def leading_terms(self, cutoff: float = 0.05) -> list[tuple[float, Determinant]]:
        order = np.argsort(-np.abs(self.coefficients))
        out = []
        for i in order:
            c = float(self.coefficients[i])
            if abs(c) < cutoff:
                break
            out.append((c, self.basis[i]))
        return out

    def report_text(self) -> str:
        """Eigenpair report: energy line, then coefficients by |c| descending."""
        lines = [f"{self.energy!r}"]
        order = np.argsort(-np.abs(self.coefficients))
        for i in order:
            lines.append(f"{float(self.coefficients[i])!r} "
                         f"{self.basis[i].to_text(self.n_orb)}")
        return "\n".join(lines) + "\n"


def hartree_fock_determinant(ints: MolecularIntegrals) -> Determinant:
    """Aufbau determinant: lowest n_alpha / n_beta orbitals occupied."""
    return Determinant((1 << ints.n_alpha) - 1, (1 << ints.n_beta) - 1)


# ---------------------------------------------------------------------------
# Slater-Condon matrix elements
# ---------------------------------------------------------------------------

def _parity(mask: int, i: int, a: int) -> float:
    return -1.0 if bits_between(mask, i, a) & 1 else 1.0


def _diagonal_element(d: Determinant, ints: MolecularIntegrals) -> float:
    h, g = ints.h, ints.g
    occ_a, occ_b = d.alpha_list(), d.beta_list()
    val = ints.core_energy
    for p in occ_a:
        val += h[p, p]
    for p in occ_b:
        val += h[p, p]
    for occ in (occ_a, occ_b):
        for p in occ:
            for q in occ:
                val += 0.5 * (g[p, p, q, q] - g[p, q, q, p])
    for p in occ_a:
        for q in occ_b:
            val += g[p, p, q, q]
    return float(val)


def _single_element(mask: int, i: int, a: int, occ_same: list[int],
                    occ_other: list[int], ints: MolecularIntegrals) -> float:
    """<d| H |d(i->a)> within one spin sector; mask is the sector occupancy of d."""
    h, g = ints.h, ints.g
    val = h[i, a]
    for q in occ_same:
        if q == i:
            continue
        val += g[i, a, q, q] - g[i, q, q, a]
    for q in occ_other:
        val += g[i, a, q, q]
    return float(val) * _parity(mask, i, a)


def _double_same_spin(mask: int, holes: list[int], parts: list[int],
                      ints: MolecularIntegrals) -> float:
    (i, j), (a, b) = sorted(holes), sorted(parts)
    sign = _parity(mask, i, a)
    mask ^= (1 << i) | (1 << a)
    sign *= _parity(mask, j, b)
    g = ints.g
    return sign * float(g[i, a, j, b] - g[i, b, j, a])


def slater_condon_element(d1: Determinant, d2: Determinant,
                          ints: MolecularIntegrals) -> float:
    """<d1|H|d2> in Hartree, zero beyond double excitations.

    The core energy enters the diagonal. Particle numbers must match per
    spin sector.
    """
    if d1.n_alpha != d2.n_alpha or d1.n_beta != d2.n_beta:
        raise ValueError("determinants live in different particle-number sectors")
    xor_a = d1.alpha_mask ^ d2.alpha_mask
    xor_b = d1.beta_mask ^ d2.beta_mask
    deg_a = xor_a.bit_count() // 2
    deg_b = xor_b.bit_count() // 2
    degree = deg_a + deg_b
    if degree == 0:
        return _diagonal_element(d1, ints)
    if degree > 2:
        return 0.0

    if degree == 1:
        if deg_a == 1:
            mask, other = d1.alpha_mask, d1.beta_list()
            occ = d1.alpha_list()
            hole = next(iter_bits(xor_a & d1.alpha_mask))
            part = next(iter_bits(xor_a & d2.alpha_mask))
        else:
            mask, other = d1.beta_mask, d1.alpha_list()
            occ = d1.beta_list()
            hole = next(iter_bits(xor_b & d1.beta_mask))
            part = next(iter_bits(xor_b & d2.beta_mask))
        return _single_element(mask, hole, part, occ, other, ints)

    if deg_a == 2:
        holes = list(iter_bits(xor_a & d1.alpha_mask))
        parts = list(iter_bits(xor_a & d2.alpha_mask))
        return _double_same_spin(d1.alpha_mask, holes, parts, ints)
    if deg_b == 2:
        holes = list(iter_bits(xor_b & d1.beta_mask))
        parts = list(iter_bits(xor_b & d2.beta_mask))
        return _double_same_spin(d1.beta_mask, holes, parts, ints)

    # one alpha and one beta excitation
    ia = next(iter_bits(xor_a & d1.alpha_mask))
    aa = next(iter_bits(xor_a & d2.alpha_mask))
    ib = next(iter_bits(xor_b & d1.beta_mask))
    ab = next(iter_bits(xor_b & d2.beta_mask))
    sign = _parity(d1.alpha_mask, ia, aa) * _parity(d1.beta_mask, ib, ab)
    return sign * float(ints.g[ia, aa, ib, ab])


def determinant_irrep(d: Determinant, ints: MolecularIntegrals) -> int:
    """XOR-composed abelian irrep label over all occupied spin orbitals."""
    if ints.orb_irreps is None:
        raise ValueError("integrals carry no orbital irrep labels")
    label = 0
    for p in iter_bits(d.alpha_mask):
        label ^= ints.orb_irreps[p]
    for p in iter_bits(d.beta_mask):
        label ^= ints.orb_irreps[p]
    return label


# ---------------------------------------------------------------------------
# Subspace Hamiltonian assembly
# ---------------------------------------------------------------------------

def build_subspace_matrix(basis: DeterminantSet,
                          ints: MolecularIntegrals) -> SubspaceHamiltonian:
    """Assemble <d_i|H|d_j> over the basis as a sparse symmetric matrix.

    Pairs beyond double excitations are screened structurally (popcount of
    the occupancy XOR) before any integral work.
    """
    if len(basis) == 0:
        raise ValueError("empty determinant basis")
    basis.sector()  # validates uniformity
    n = len(basis)
    n_orb = ints.n_orb
    amask = np.array([d.alpha_mask for d in basis], dtype=np.uint64)
    bmask = np.array([d.beta_mask for d in basis], dtype=np.uint64)

    orbs = np.arange(n_orb, dtype=np.uint64)
    occ_a = ((amask[:, None] >> orbs) & np.uint64(1)).astype(float)
    occ_b = ((bmask[:, None] >> orbs) & np.uint64(1)).astype(float)
    hdiag = np.diag(ints.h)
    jmat = np.einsum("ppqq->pq", ints.g)
    kmat = np.einsum("pqqp->pq", ints.g)
    diag = ints.core_energy + (occ_a + occ_b) @ hdiag
    diag += 0.5 * (np.einsum("ip,pq,iq->i", occ_a, jmat - kmat, occ_a)
                   + np.einsum("ip,pq,iq->i", occ_b, jmat - kmat, occ_b))
    diag += np.einsum("ip,pq,iq->i", occ_a, jmat, occ_b)

    rows: list[int] = [*range(n)]
    cols: list[int] = [*range(n)]
    vals: list[float] = diag.tolist()
    dets = basis.dets
    for i in range(n):
        if i + 1 == n:
            break
        deg = (np.bitwise_count(amask[i] ^ amask[i + 1:])
               + np.bitwise_count(bmask[i] ^ bmask[i + 1:])) >> 1
        for off in np.nonzero(deg <= 2)[0]:
            j = i + 1 + int(off)
            val = slater_condon_element(dets[i], dets[j], ints)
            if val != 0.0:
                rows += [i, j]
                cols += [j, i]
                vals += [val, val]
    mat = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    return SubspaceHamiltonian(basis=basis, matrix=mat, n_orb=n_orb)


# ---------------------------------------------------------------------------
# Diagonalization
# ---------------------------------------------------------------------------

def _fix_sign(vec: np.ndarray) -> np.ndarray:
    lead = int(np.argmax(np.abs(vec)))
    return -vec if vec[lead] < 0 else vec


def _davidson(matrix: scipy.sparse.csr_matrix, n_roots: int,
              tol: float = DAVIDSON_TOL,
              max_subspace: int = DAVIDSON_MAX_SUBSPACE,
              max_iter: int = DAVIDSON_MAX_ITER) -> tuple[np.ndarray, np.ndarray]:
    dim = matrix.shape[0]
    diag = matrix.diagonal()
    max_subspace = min(max(max_subspace, 2 * n_roots + 2), dim)

    start = np.argsort(diag)[:n_roots]
    V = np.zeros((dim, n_roots))
    for col, row in enumerate(start):
        V[row, col] = 1.0
    W = matrix @ V

    theta = np.zeros(n_roots)
    resnorms = np.full(n_roots, np.inf)
    for _ in range(max_iter):
        s = V.T @ W
        s = 0.5 * (s + s.T)
        evals, evecs = np.linalg.eigh(s)
        theta = evals[:n_roots]
        y = evecs[:, :n_roots]
        X = V @ y
        WX = W @ y
        residuals = WX - X * theta
        resnorms = np.linalg.norm(residuals, axis=0)
        if np.all(resnorms < tol):
            return theta, X
        if V.shape[1] >= max_subspace:
            V, W = X, WX
        new_cols = []
        for r in range(n_roots):
            if resnorms[r] < tol:
                continue
            denom = diag - theta[r]
            denom = np.where(np.abs(denom) < 1e-12, 1e-12, denom)
            t = residuals[:, r] / denom
            for _ in range(2):  # re-orthogonalize against the subspace
                t -= V @ (V.T @ t)
                for c in new_cols:
                    t -= c * (c @ t)
            nrm = np.linalg.norm(t)
            if nrm > 1e-10:
                new_cols.append(t / nrm)
        if not new_cols:
            # stagnated below orthogonality floor; accept if near tolerance
            if np.all(resnorms < 100 * tol):
                return theta, X
            raise DavidsonError(
                f"Davidson stagnated with residuals {resnorms}", resnorms)
        T = np.column_stack(new_cols)
        V = np.column_stack([V, T])
        W = np.column_stack([W, matrix @ T])
    raise DavidsonError(
        f"Davidson did not converge in {max_iter} iterations; "
        f"final residual norms {resnorms}", resnorms)


def diagonalize_subspace(h: SubspaceHamiltonian, n_roots: int = 1,
                         backend: str = "auto") -> list[CIResult]:
    """Lowest eigenpairs of the subspace Hamiltonian.

    ``auto`` uses dense diagonalization below dimension 2000 and Davidson
    (diagonal preconditioning, residual tolerance 1e-8) above. Degenerate
    roots come back in ascending-energy order; the largest-magnitude
    coefficient of each eigenvector is made positive.
    """
    dim = h.dim
    if not 1 <= n_roots <= dim:
        raise ValueError(f"n_roots={n_roots} outside [1, {dim}]")
    if backend == "auto":
        backend = "dense" if dim < DENSE_BACKEND_LIMIT else "davidson"
    if backend == "dense":
        evals, evecs = scipy.linalg.eigh(h.matrix.toarray())
        energies = evals[:n_roots]
        vectors = evecs[:, :n_roots]
    elif backend == "davidson":
        energies, vectors = _davidson(h.matrix, n_roots)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    results = []
    for r in range(n_roots):
        vec = _fix_sign(np.asarray(vectors[:, r]))
        results.append(CIResult(energy=float(energies[r]), coefficients=vec,
                                basis=h.basis, n_orb=h.n_orb))
    return results


# ---------------------------------------------------------------------------
# Reference spaces and observables
# ---------------------------------------------------------------------------

def enumerate_cas_determinants(ints: MolecularIntegrals,
                               irrep_filter: bool = False) -> DeterminantSet:
    """Every determinant of the (n_alpha, n_beta) sector, optionally
    restricted to the target irrep. Without orbital irrep labels the
    filter is a no-op (no symmetry information, no filtering)."""
    filtering = irrep_filter and ints.orb_irreps is not None
    target = ints.target_irrep if ints.target_irrep is not None else 0
    out = DeterminantSet()
    alpha_masks = [_mask_of(c) for c in combinations(range(ints.n_orb), ints.n_alpha)]
    beta_masks = [_mask_of(c) for c in combinations(range(ints.n_orb), ints.n_beta)]
    for am in alpha_masks:
        for bm in beta_masks:
            d = Determinant(am, bm)
            if filtering and determinant_irrep(d, ints) != target:
                continue
            out.add(d)
    return out


def _mask_of(positions) -> int:
    mask = 0
    for p in positions:
        mask |= 1 << p
    return mask


def casci_ground_state(ints: MolecularIntegrals, irrep_filter: bool = False,
                       backend: str = "auto") -> CIResult:
    """Exact diagonalization over the full active-space determinant set."""
    basis = enumerate_cas_determinants(ints, irrep_filter)
    sub = build_subspace_matrix(basis, ints)
    return diagonalize_subspace(sub, 1, backend)[0]


def s_squared_expectation(r: CIResult) -> float:
    """<S^2> of the CI state, exact over the spin-raised image space."""
    n_alpha, n_beta = r.basis.sector()
    ms = 0.5 * (n_alpha - n_beta)
    raised: dict[Determinant, float] = {}
    for coeff, det in zip(r.coefficients, r.basis):
        c = float(coeff)
        if c == 0.0:
            continue
        amask, bmask = det.alpha_mask, det.beta_mask
        n_a = det.n_alpha
        for p in iter_bits(bmask & ~amask):
            below = (1 << p) - 1
            crossings = n_a + (bmask & below).bit_count() + (amask & below).bit_count()
            phase = -1.0 if crossings & 1 else 1.0
            img = Determinant(amask | (1 << p), bmask & ~(1 << p))
            raised[img] = raised.get(img, 0.0) + phase * c
    ladder = sum(v * v for v in raised.values())
    return float(ms * ms + ms + ladder)


def orbital_occupations(r: CIResult) -> OccupationVector:
    """Average alpha/beta occupation numbers of the CI state."""
    occ_a = np.zeros(r.n_orb)
    occ_b = np.zeros(r.n_orb)
    for coeff, det in zip(r.coefficients, r.basis):
        w = float(coeff) ** 2
        for p in iter_bits(det.alpha_mask):
            occ_a[p] += w
        for p in iter_bits(det.beta_mask):
            occ_b[p] += w
    return OccupationVector(np.clip(occ_a, 0.0, 1.0), np.clip(occ_b, 0.0, 1.0))
