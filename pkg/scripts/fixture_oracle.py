"""Minimal STO-3G electronic-structure oracle used to generate test fixtures.

Stands in for the external quantum-chemistry program that produces the
FCIDUMP inputs: Gaussian integrals via McMurchie-Davidson recursion
(s and p shells), restricted Hartree-Fock with DIIS, abelian point-group
labeling of the molecular orbitals, frozen-core active-space reduction,
and FCIDUMP export. Not part of the installable package; only the emitted
fixture files are consumed by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln

ANGSTROM_TO_BOHR = 1.0 / 0.529177210903

# STO-3G exponents and contraction coefficients (normalized-primitive form)
STO3G = {
    "H": {
        "Z": 1,
        "shells": [("s", [3.425250914, 0.6239137298, 0.1688554040],
                    [0.1543289673, 0.5353281423, 0.4446345422])],
    },
    "C": {
        "Z": 6,
        "shells": [
            ("s", [71.61683735, 13.04509632, 3.530512160],
             [0.1543289673, 0.5353281423, 0.4446345422]),
            ("s", [2.941249355, 0.6834830964, 0.2222899159],
             [-0.09996722919, 0.3995128261, 0.7001154689]),
            ("p", [2.941249355, 0.6834830964, 0.2222899159],
             [0.1559162750, 0.6076837186, 0.3919573931]),
        ],
    },
    "N": {
        "Z": 7,
        "shells": [
            ("s", [99.10616896, 18.05231239, 4.885660238],
             [0.1543289673, 0.5353281423, 0.4446345422]),
            ("s", [3.780455879, 0.8784966449, 0.2857143744],
             [-0.09996722919, 0.3995128261, 0.7001154689]),
            ("p", [3.780455879, 0.8784966449, 0.2857143744],
             [0.1559162750, 0.6076837186, 0.3919573931]),
        ],
    },
    "O": {
        "Z": 8,
        "shells": [
            ("s", [130.7093214, 23.80886605, 6.443608313],
             [0.1543289673, 0.5353281423, 0.4446345422]),
            ("s", [5.033151319, 1.169596125, 0.3800889730],
             [-0.09996722919, 0.3995128261, 0.7001154689]),
            ("p", [5.033151319, 1.169596125, 0.3800889730],
             [0.1559162750, 0.6076837186, 0.3919573931]),
        ],
    },
}

_P_COMPONENTS = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


@dataclass
class Shell:
    l: int
    center: np.ndarray
    exps: np.ndarray
    coefs: np.ndarray  # includes primitive norms; contracted-normalized

    @property
    def n_comp(self) -> int:
        return 1 if self.l == 0 else 3

    def components(self):
        return [(0, 0, 0)] if self.l == 0 else _P_COMPONENTS


@dataclass
class Molecule:
    symbols: list[str]
    coords: np.ndarray  # bohr
    shells: list[Shell]
    ao_labels: list[tuple[int, tuple[int, int, int]]]  # (atom, cartesian powers)
    charges: np.ndarray

    @property
    def n_ao(self) -> int:
        return len(self.ao_labels)

    @property
    def n_elec(self) -> int:
        return int(self.charges.sum())

    def nuclear_repulsion(self) -> float:
        e = 0.0
        for i in range(len(self.charges)):
            for j in range(i):
                r = np.linalg.norm(self.coords[i] - self.coords[j])
                e += self.charges[i] * self.charges[j] / r
        return e


def _primitive_norm(l: int, a: float) -> float:
    # same norm for every Cartesian component at l <= 1
    return (2 * a / math.pi) ** 0.75 * (4 * a) ** (l / 2.0)


def build_molecule(atoms: list[tuple[str, tuple[float, float, float]]],
                   unit: str = "angstrom") -> Molecule:
    scale = ANGSTROM_TO_BOHR if unit.startswith("ang") else 1.0
    symbols = [sym for sym, _ in atoms]
    coords = np.array([xyz for _, xyz in atoms], dtype=float) * scale
    shells: list[Shell] = []
    ao_labels: list[tuple[int, tuple[int, int, int]]] = []
    for ia, sym in enumerate(symbols):
        for kind, exps, coefs in STO3G[sym]["shells"]:
            l = 0 if kind == "s" else 1
            exps_arr = np.array(exps)
            coefs_arr = np.array(coefs) * np.array([_primitive_norm(l, a) for a in exps])
            shell = Shell(l, coords[ia], exps_arr, coefs_arr)
            # renormalize the contraction to unit self-overlap
            s_self = _shell_self_overlap(shell)
            shell.coefs = shell.coefs / math.sqrt(s_self)
            shells.append(shell)
            for comp in shell.components():
                ao_labels.append((ia, comp))
    charges = np.array([STO3G[sym]["Z"] for sym in symbols], dtype=float)
    return Molecule(symbols, coords, shells, ao_labels, charges)


# ---------------------------------------------------------------------------
# McMurchie-Davidson machinery
# ---------------------------------------------------------------------------

def _e_table(la: int, lb: int, a, b, A: float, B: float):
    """Hermite expansion coefficients E[i, j, t] for one dimension.

    ``a``/``b`` may be arrays (primitive batches); the returned array has
    shape (*batch, la+1, lb+1, la+lb+1).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    batch = a.shape
    p = a + b
    q = A - B
    xpa = -(b / p) * q
    xpb = (a / p) * q
    tmax = la + lb
    E = np.zeros(batch + (la + 1, lb + 1, tmax + 1))
    E[..., 0, 0, 0] = np.exp(-(a * b / p) * q * q)
    for i in range(1, la + 1):
        for t in range(i + 1):
            val = xpa * E[..., i - 1, 0, t]
            if t > 0:
                val = val + E[..., i - 1, 0, t - 1] / (2 * p)
            if t + 1 <= i - 1:
                val = val + (t + 1) * E[..., i - 1, 0, t + 1]
            E[..., i, 0, t] = val
    for j in range(1, lb + 1):
        for i in range(la + 1):
            for t in range(i + j + 1):
                val = xpb * E[..., i, j - 1, t]
                if t > 0:
                    val = val + E[..., i, j - 1, t - 1] / (2 * p)
                if t + 1 <= i + j - 1:
                    val = val + (t + 1) * E[..., i, j - 1, t + 1]
                E[..., i, j, t] = val
    return E


def boys(n_max: int, x: np.ndarray) -> np.ndarray:
    """F_n(x) for n = 0..n_max; shape (*x.shape, n_max+1)."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (n_max + 1,))
    small = x < 1e-13
    xs = np.where(small, 1.0, x)
    for n in range(n_max + 1):
        a = n + 0.5
        val = 0.5 * np.exp(gammaln(a)) * gammainc(a, xs) / xs ** a
        out[..., n] = np.where(small, 1.0 / (2 * n + 1), val)
    return out


def _hermite_r(alpha: np.ndarray, X: np.ndarray, tmax: int, umax: int, vmax: int):
    """Hermite Coulomb tensor R_{tuv}; shape (*batch, tmax+1, umax+1, vmax+1)."""
    batch = alpha.shape
    nmax = tmax + umax + vmax
    r2 = np.einsum("...d,...d->...", X, X)
    F = boys(nmax, alpha * r2)
    scale = (-2.0 * alpha)[..., None] ** np.arange(nmax + 1)
    base = scale * F  # R^n_{000}
    R = np.zeros((nmax + 1,) + batch + (tmax + 1, umax + 1, vmax + 1))
    R[..., 0, 0, 0] = np.moveaxis(base, -1, 0)
    for n in range(nmax - 1, -1, -1):
        for v in range(1, vmax + 1):
            val = X[..., 2] * R[n + 1][..., 0, 0, v - 1]
            if v > 1:
                val = val + (v - 1) * R[n + 1][..., 0, 0, v - 2]
            R[n][..., 0, 0, v] = val
        for u in range(1, umax + 1):
            for v in range(vmax + 1):
                val = X[..., 1] * R[n + 1][..., 0, u - 1, v]
                if u > 1:
                    val = val + (u - 1) * R[n + 1][..., 0, u - 2, v]
                R[n][..., 0, u, v] = val
        for t in range(1, tmax + 1):
            for u in range(umax + 1):
                for v in range(vmax + 1):
                    val = X[..., 0] * R[n + 1][..., t - 1, u, v]
                    if t > 1:
                        val = val + (t - 1) * R[n + 1][..., t - 2, u, v]
                    R[n][..., t, u, v] = val
    return R[0]


@dataclass
class PairData:
    """Precomputed primitive-pair quantities for one shell pair."""

    sa: Shell
    sb: Shell
    p: np.ndarray        # (n_prim_pairs,)
    P: np.ndarray        # (n_prim_pairs, 3)
    coef: np.ndarray     # (n_prim_pairs,) contraction coefficient products
    E: np.ndarray        # (n_prim_pairs, n_comp_ab, tx, ty, tz) Hermite products
    lsum: int

    @property
    def n_comp(self) -> tuple[int, int]:
        return self.sa.n_comp, self.sb.n_comp


def make_pair(sa: Shell, sb: Shell) -> PairData:
    a = sa.exps[:, None].repeat(len(sb.exps), 1).ravel()
    b = sb.exps[None, :].repeat(len(sa.exps), 0).ravel()
    ca = sa.coefs[:, None].repeat(len(sb.coefs), 1).ravel()
    cb = sb.coefs[None, :].repeat(len(sa.coefs), 0).ravel()
    p = a + b
    P = (a[:, None] * sa.center[None, :] + b[:, None] * sb.center[None, :]) / p[:, None]
    lsum = sa.l + sb.l
    etabs = [_e_table(sa.l, sb.l, a, b, sa.center[d], sb.center[d]) for d in range(3)]
    comps_a = sa.components()
    comps_b = sb.components()
    n_pairs = len(p)
    E = np.zeros((n_pairs, len(comps_a) * len(comps_b),
                  lsum + 1, lsum + 1, lsum + 1))
    for ia, (ax, ay, az) in enumerate(comps_a):
        for ib, (bx, by, bz) in enumerate(comps_b):
            col = ia * len(comps_b) + ib
            ex = etabs[0][:, ax, bx, : ax + bx + 1]
            ey = etabs[1][:, ay, by, : ay + by + 1]
            ez = etabs[2][:, az, bz, : az + bz + 1]
            E[:, col, : ax + bx + 1, : ay + by + 1, : az + bz + 1] = (
                ex[:, :, None, None] * ey[:, None, :, None] * ez[:, None, None, :])
    return PairData(sa, sb, p, P, ca * cb, E, lsum)


def overlap_kinetic(mol: Molecule) -> tuple[np.ndarray, np.ndarray]:
    n = mol.n_ao
    S = np.zeros((n, n))
    T = np.zeros((n, n))
    offs = _shell_offsets(mol)
    for ish, sa in enumerate(mol.shells):
        for jsh in range(ish + 1):
            sb = mol.shells[jsh]
            sblk, tblk = _overlap_kinetic_block(sa, sb)
            _scatter_2idx(S, sblk, offs[ish], offs[jsh])
            _scatter_2idx(T, tblk, offs[ish], offs[jsh])
    return S, T


def _overlap_kinetic_block(sa: Shell, sb: Shell):
    a = sa.exps[:, None].repeat(len(sb.exps), 1).ravel()
    b = sb.exps[None, :].repeat(len(sa.exps), 0).ravel()
    ca = sa.coefs[:, None].repeat(len(sb.coefs), 1).ravel()
    cb = sb.coefs[None, :].repeat(len(sa.coefs), 0).ravel()
    p = a + b
    pref = ca * cb * (math.pi / p) ** 1.5
    # E tables with lb extended by 2 for the kinetic-energy ladder
    etabs = [_e_table(sa.l, sb.l + 2, a, b, sa.center[d], sb.center[d]) for d in range(3)]

    def s1d(d, i, j):
        return etabs[d][:, i, j, 0]

    comps_a = sa.components()
    comps_b = sb.components()
    sblk = np.zeros((len(comps_a), len(comps_b)))
    tblk = np.zeros((len(comps_a), len(comps_b)))
    for ia, ka in enumerate(comps_a):
        for ib, kb in enumerate(comps_b):
            sdims = [s1d(d, ka[d], kb[d]) for d in range(3)]
            sblk[ia, ib] = float(np.sum(pref * sdims[0] * sdims[1] * sdims[2]))
            tot = np.zeros_like(p)
            for d in range(3):
                j = kb[d]
                kin = -2.0 * b ** 2 * s1d(d, ka[d], j + 2) \
                    + b * (2 * j + 1) * s1d(d, ka[d], j)
                if j >= 2:
                    kin = kin - 0.5 * j * (j - 1) * s1d(d, ka[d], j - 2)
                others = [s1d(dd, ka[dd], kb[dd]) for dd in range(3) if dd != d]
                tot = tot + kin * others[0] * others[1]
            tblk[ia, ib] = float(np.sum(pref * tot))
    return sblk, tblk


def nuclear_attraction(mol: Molecule) -> np.ndarray:
    n = mol.n_ao
    V = np.zeros((n, n))
    offs = _shell_offsets(mol)
    for ish, sa in enumerate(mol.shells):
        for jsh in range(ish + 1):
            pair = make_pair(sa, mol.shells[jsh])
            nca, ncb = pair.n_comp
            blk = np.zeros((nca * ncb,))
            L = pair.lsum
            for ic in range(len(mol.charges)):
                X = pair.P - mol.coords[ic][None, :]
                R = _hermite_r(pair.p, X, L, L, L)
                pref = -mol.charges[ic] * 2.0 * math.pi / pair.p * pair.coef
                blk += np.einsum("i,ictuv,ituv->c", pref, pair.E, R)
            _scatter_2idx(V, blk.reshape(nca, ncb), offs[ish], offs[jsh])
    return V


def electron_repulsion(mol: Molecule) -> np.ndarray:
    """Full (ij|kl) tensor in chemists' notation."""
    n = mol.n_ao
    offs = _shell_offsets(mol)
    pairs = [[None] * len(mol.shells) for _ in mol.shells]
    eri = np.zeros((n, n, n, n))
    shell_pairs = []
    for ish in range(len(mol.shells)):
        for jsh in range(ish + 1):
            pairs[ish][jsh] = make_pair(mol.shells[ish], mol.shells[jsh])
            shell_pairs.append((ish, jsh))
    for ipair, (ish, jsh) in enumerate(shell_pairs):
        bra = pairs[ish][jsh]
        for kpair in range(ipair + 1):
            ksh, lsh = shell_pairs[kpair]
            ket = pairs[ksh][lsh]
            block = _eri_block(bra, ket)
            _scatter_eri(eri, block, offs[ish], offs[jsh], offs[ksh], offs[lsh],
                         bra.sa.n_comp, bra.sb.n_comp, ket.sa.n_comp, ket.sb.n_comp)
    return eri


def _eri_block(bra: PairData, ket: PairData) -> np.ndarray:
    nb = len(bra.p)
    nk = len(ket.p)
    pb = bra.p[:, None]
    pk = ket.p[None, :]
    alpha = pb * pk / (pb + pk)
    X = bra.P[:, None, :] - ket.P[None, :, :]
    Lb, Lk = bra.lsum, ket.lsum
    R = _hermite_r(alpha, X, Lb + Lk, Lb + Lk, Lb + Lk)
    pref = (2 * math.pi ** 2.5 / (pb * pk * np.sqrt(pb + pk))
            * bra.coef[:, None] * ket.coef[None, :])
    ncd = ket.E.shape[1]
    # fold the ket Hermite charges into R with alternating parity
    H = np.zeros((nb, nk, ncd, Lb + 1, Lb + 1, Lb + 1))
    for x in range(Lk + 1):
        for y in range(Lk + 1):
            for z in range(Lk + 1):
                w = ket.E[:, :, x, y, z]
                if not w.any():
                    continue
                sign = -1.0 if (x + y + z) % 2 else 1.0
                H += (sign * w)[None, :, :, None, None, None] * \
                    R[:, :, None, x:x + Lb + 1, y:y + Lb + 1, z:z + Lb + 1]
    out = np.einsum("iatuv,ij,ijctuv->ac", bra.E, pref, H)
    nca, ncb = bra.n_comp
    ncc, ncdd = ket.n_comp
    return out.reshape(nca, ncb, ncc, ncdd)


def _shell_offsets(mol: Molecule) -> list[int]:
    offs = []
    total = 0
    for sh in mol.shells:
        offs.append(total)
        total += sh.n_comp
    return offs


def _scatter_2idx(M: np.ndarray, blk: np.ndarray, oi: int, oj: int):
    ni, nj = blk.shape
    M[oi:oi + ni, oj:oj + nj] = blk
    M[oj:oj + nj, oi:oi + ni] = blk.T


def _scatter_eri(eri, blk, oi, oj, ok, ol, ni, nj, nk, nl):
    for a in range(ni):
        for b in range(nj):
            for c in range(nk):
                for d in range(nl):
                    v = blk[a, b, c, d]
                    i, j, k, l = oi + a, oj + b, ok + c, ol + d
                    eri[i, j, k, l] = v
                    eri[j, i, k, l] = v
                    eri[i, j, l, k] = v
                    eri[j, i, l, k] = v
                    eri[k, l, i, j] = v
                    eri[l, k, i, j] = v
                    eri[k, l, j, i] = v
                    eri[l, k, j, i] = v


def _shell_self_overlap(shell: Shell) -> float:
    a = shell.exps[:, None].repeat(len(shell.exps), 1).ravel()
    b = shell.exps[None, :].repeat(len(shell.exps), 0).ravel()
    ca = shell.coefs[:, None].repeat(len(shell.coefs), 1).ravel()
    cb = shell.coefs[None, :].repeat(len(shell.coefs), 0).ravel()
    p = a + b
    pref = ca * cb * (math.pi / p) ** 1.5
    if shell.l == 0:
        return float(np.sum(pref))
    # x-component self-overlap; identical for y and z
    return float(np.sum(pref / (2 * p)))


# ---------------------------------------------------------------------------
# Restricted Hartree-Fock
# ---------------------------------------------------------------------------

@dataclass
class ScfResult:
    energy: float
    mo_energies: np.ndarray
    mo_coeffs: np.ndarray
    S: np.ndarray
    hcore: np.ndarray
    eri: np.ndarray
    mol: Molecule


def run_rhf(mol: Molecule, max_iter: int = 200, conv: float = 1e-11,
            verbose: bool = False) -> ScfResult:
    if mol.n_elec % 2:
        raise ValueError("RHF needs an even electron count")
    nocc = mol.n_elec // 2
    S, T = overlap_kinetic(mol)
    V = nuclear_attraction(mol)
    hcore = T + V
    eri = electron_repulsion(mol)
    e_nuc = mol.nuclear_repulsion()

    evals, evecs = np.linalg.eigh(S)
    X = evecs @ np.diag(evals ** -0.5) @ evecs.T

    def fock(D):
        J = np.einsum("pqrs,rs->pq", eri, D)
        K = np.einsum("prqs,rs->pq", eri, D)
        return hcore + 2.0 * J - K

    C = None
    D = np.zeros_like(S)
    e_old = 0.0
    diis_f: list[np.ndarray] = []
    diis_e: list[np.ndarray] = []
    for it in range(max_iter):
        F = fock(D)
        if it > 0:
            err = F @ D @ S - S @ D @ F
            diis_f.append(F.copy())
            diis_e.append(err.copy())
            if len(diis_f) > 8:
                diis_f.pop(0)
                diis_e.pop(0)
            if len(diis_f) > 1:
                m = len(diis_f)
                B = -np.ones((m + 1, m + 1))
                B[m, m] = 0.0
                for i in range(m):
                    for j in range(m):
                        B[i, j] = np.sum(diis_e[i] * diis_e[j])
                rhs = np.zeros(m + 1)
                rhs[m] = -1.0
                try:
                    w = np.linalg.solve(B, rhs)[:m]
                    F = sum(wi * fi for wi, fi in zip(w, diis_f))
                except np.linalg.LinAlgError:
                    pass
        Fp = X.T @ F @ X
        eps, Cp = np.linalg.eigh(Fp)
        C = X @ Cp
        Cocc = C[:, :nocc]
        D = Cocc @ Cocc.T
        e_elec = np.sum(D * (hcore + fock(D)))
        e_tot = e_elec + e_nuc
        if verbose:
            print(f"  scf iter {it:3d}  E = {e_tot:.12f}  dE = {e_tot - e_old:.3e}")
        if abs(e_tot - e_old) < conv and it > 2:
            break
        e_old = e_tot
    else:
        raise RuntimeError("SCF did not converge")
    return ScfResult(e_tot, eps, C, S, hcore, eri, mol)


# ---------------------------------------------------------------------------
# Point-group labels (abelian, XOR-composable encoding)
# ---------------------------------------------------------------------------

_MIRRORS = {
    # bit value: diagonal of the reflection (sigma_yz flips x, etc.)
    1: np.array([-1.0, 1.0, 1.0]),   # sigma(yz)
    2: np.array([1.0, -1.0, 1.0]),   # sigma(xz)
    4: np.array([1.0, 1.0, -1.0]),   # sigma(xy)
}


def _atom_permutation(mol: Molecule, diag: np.ndarray, tol: float = 1e-6):
    """Map each atom to its image under the axis-aligned reflection."""
    target = mol.coords * diag[None, :]
    perm = []
    for i in range(len(mol.coords)):
        dists = np.linalg.norm(mol.coords - target[i][None, :], axis=1)
        j = int(np.argmin(dists))
        if dists[j] > tol or mol.symbols[j] != mol.symbols[i]:
            return None
        perm.append(j)
    return perm


def _ao_operator(mol: Molecule, diag: np.ndarray, perm: list[int]) -> np.ndarray:
    """Signed AO permutation matrix of the reflection."""
    n = mol.n_ao
    # locate each atom's AO start and layout
    op = np.zeros((n, n))
    index_of = {}
    for idx, (atom, comp) in enumerate(mol.ao_labels):
        index_of[(atom, comp)] = idx
    for idx, (atom, comp) in enumerate(mol.ao_labels):
        sign = 1.0
        for d in range(3):
            if comp[d] % 2 == 1 and diag[d] < 0:
                sign = -sign
        # s and p components map onto the same component type on the image atom;
        # multiple shells of the same type on one atom keep their shell slot
        op[_image_index(mol, idx, perm), idx] = sign
    return op


def _image_index(mol: Molecule, idx: int, perm: list[int]) -> int:
    atom, comp = mol.ao_labels[idx]
    # order of this (atom, comp) occurrence among the atom's AOs
    occurrence = 0
    for j in range(idx):
        if mol.ao_labels[j] == (atom, comp):
            occurrence += 1
    target_atom = perm[atom]
    count = 0
    for j, (a2, c2) in enumerate(mol.ao_labels):
        if (a2, c2) == (target_atom, comp):
            if count == occurrence:
                return j
            count += 1
    raise RuntimeError("AO image not found")


def label_orbitals(scf: ScfResult, tol: float = 1e-6,
                   degeneracy_tol: float = 1e-7) -> np.ndarray:
    """XOR-composable irrep label per MO; resolves degenerate blocks.

    Bit b of the label is set when the orbital is odd under the mirror
    associated with that bit (sigma_yz, sigma_xz, sigma_xy). Missing
    symmetries contribute bit 0.
    """
    mol = scf.mol
    C = scf.mo_coeffs.copy()
    n_mo = C.shape[1]
    S = scf.S
    ops = {}
    for bit, diag in _MIRRORS.items():
        perm = _atom_permutation(mol, diag)
        if perm is not None:
            ops[bit] = _ao_operator(mol, diag, perm)

    # group orbitals into near-degenerate clusters and joint-diagonalize the
    # mirror representations so every column is symmetry-pure
    eps = scf.mo_energies
    clusters: list[list[int]] = [[0]]
    for i in range(1, n_mo):
        if abs(eps[i] - eps[i - 1]) < degeneracy_tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    def resolve(block: np.ndarray, op_list: list[np.ndarray]) -> np.ndarray:
        """Split a degenerate block into joint mirror eigenvectors."""
        if not op_list or block.shape[1] == 1:
            return block
        op, rest = op_list[0], op_list[1:]
        M = block.T @ S @ (op @ block)
        M = 0.5 * (M + M.T)
        evals, rot = np.linalg.eigh(M)
        block = block @ rot
        pieces = []
        start = 0
        for i in range(1, block.shape[1] + 1):
            if i == block.shape[1] or abs(evals[i] - evals[start]) > 0.5:
                pieces.append(resolve(block[:, start:i], rest))
                start = i
        return np.column_stack(pieces)

    for cluster in clusters:
        if len(cluster) == 1:
            continue
        cols = np.array(cluster)
        C[:, cols] = resolve(C[:, cols], list(ops.values()))
    scf.mo_coeffs[:, :] = C

    labels = np.zeros(n_mo, dtype=int)
    for bit, op in ops.items():
        chars = np.einsum("pi,pq,qi->i", C, S, op @ C)
        if np.any(np.abs(np.abs(chars) - 1.0) > 1e-4):
            bad = int(np.argmax(np.abs(np.abs(chars) - 1.0)))
            raise RuntimeError(
                f"orbital {bad} is not symmetry-pure (character {chars[bad]:.6f})")
        labels |= (chars < 0).astype(int) * bit
    return labels


# ---------------------------------------------------------------------------
# Active space reduction and FCIDUMP export
# ---------------------------------------------------------------------------

def transform_mo(scf: ScfResult) -> tuple[np.ndarray, np.ndarray]:
    C = scf.mo_coeffs
    h_mo = C.T @ scf.hcore @ C
    eri_mo = np.einsum("pqrs,pi->iqrs", scf.eri, C, optimize=True)
    eri_mo = np.einsum("iqrs,qj->ijrs", eri_mo, C, optimize=True)
    eri_mo = np.einsum("ijrs,rk->ijks", eri_mo, C, optimize=True)
    eri_mo = np.einsum("ijks,sl->ijkl", eri_mo, C, optimize=True)
    return h_mo, eri_mo


def active_space(scf: ScfResult, frozen: list[int], active: list[int]
                 ) -> tuple[float, np.ndarray, np.ndarray]:
    """Frozen-core effective integrals over the active orbital window."""
    h_mo, eri_mo = transform_mo(scf)
    core_e = scf.mol.nuclear_repulsion()
    for c in frozen:
        core_e += 2.0 * h_mo[c, c]
        for d in frozen:
            core_e += 2.0 * eri_mo[c, c, d, d] - eri_mo[c, d, d, c]
    n_act = len(active)
    h_eff = np.zeros((n_act, n_act))
    for i, p in enumerate(active):
        for j, q in enumerate(active):
            val = h_mo[p, q]
            for c in frozen:
                val += 2.0 * eri_mo[p, q, c, c] - eri_mo[p, c, c, q]
            h_eff[i, j] = val
    g_act = eri_mo[np.ix_(active, active, active, active)]
    return core_e, h_eff, g_act


def export_fcidump(path, core_e: float, h: np.ndarray, g: np.ndarray,
                   n_elec: int, ms2: int = 0,
                   orbsym: list[int] | None = None, isym: int = 1,
                   sym_clean_tol: float = 0.0) -> None:
    """Write an FCIDUMP with exact 8-fold symmetry (entries averaged)."""
    n = h.shape[0]
    h = 0.5 * (h + h.T)
    g = (g + g.transpose(1, 0, 2, 3) + g.transpose(0, 1, 3, 2)
         + g.transpose(1, 0, 3, 2) + g.transpose(2, 3, 0, 1)
         + g.transpose(2, 3, 1, 0) + g.transpose(3, 2, 0, 1)
         + g.transpose(3, 2, 1, 0)) / 8.0
    if sym_clean_tol > 0.0:
        h = np.where(np.abs(h) < sym_clean_tol, 0.0, h)
        g = np.where(np.abs(g) < sym_clean_tol, 0.0, g)
    lines = [f"&FCI NORB={n},NELEC={n_elec},MS2={ms2},"]
    if orbsym is not None:
        lines.append(" ORBSYM=" + ",".join(str(s) for s in orbsym) + ",")
        lines.append(f" ISYM={isym},")
    lines.append("&END")
    emitted = set()
    for p in range(n):
        for q in range(p + 1):
            for r in range(n):
                for s in range(r + 1):
                    if (p, q) < (r, s):
                        continue
                    key = min((p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                              (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p))
                    if key in emitted:
                        continue
                    emitted.add(key)
                    val = g[p, q, r, s]
                    if val != 0.0:
                        lines.append(f"{float(val)!r} {p + 1} {q + 1} {r + 1} {s + 1}")
    for p in range(n):
        for q in range(p + 1):
            if h[p, q] != 0.0:
                lines.append(f"{float(h[p, q])!r} {p + 1} {q + 1} 0 0")
    lines.append(f"{float(core_e)!r} 0 0 0 0")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
