"""Molecular integral ingestion and bookkeeping.

Integrals enter as FCIDUMP files (namelist header, then ``value i j k l``
records with 1-based indices). Two-electron integrals are stored in the
chemists' convention (ij|kl) with the full 8-fold permutational symmetry
replicated on parse, so downstream code can index ``g[i, j, k, l]`` freely.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass, replace
from typing import Sequence, TextIO

import numpy as np

__all__ = [
    "MolecularIntegrals",
    "FcidumpError",
    "SymmetryViolation",
    "parse_fcidump",
    "read_fcidump",
    "write_fcidump",
    "validate_integral_symmetry",
    "apply_orbital_permutation",
]

SYMMETRY_TOL = 1e-12


class FcidumpError(ValueError):
    """Raised for malformed FCIDUMP input; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass
class MolecularIntegrals:
    """Active-space molecular integrals in Hartree atomic units.

    Attributes
    ----------
    n_orb : int
        Number of spatial orbitals.
    n_alpha, n_beta : int
        Electrons per spin sector (``n_alpha >= n_beta``).
    core_energy : float
        Nuclear repulsion plus any frozen-core contribution.
    h : ndarray, shape (n_orb, n_orb)
        One-electron integrals, symmetric.
    g : ndarray, shape (n_orb,) * 4
        Two-electron integrals in chemists' notation (ij|kl), 8-fold symmetric.
    orb_irreps : tuple of int, optional
        Per-orbital abelian irrep labels in the XOR-composable binary
        encoding (FCIDUMP ORBSYM minus one). ``None`` disables every
        symmetry filter downstream.
    target_irrep : int, optional
        Irrep label of the desired state (FCIDUMP ISYM minus one).
    """

    n_orb: int
    n_alpha: int
    n_beta: int
    core_energy: float
    h: np.ndarray
    g: np.ndarray
    orb_irreps: tuple[int, ...] | None = None
    target_irrep: int | None = None

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float)
        self.g = np.asarray(self.g, dtype=float)
        if self.h.shape != (self.n_orb, self.n_orb):
            raise ValueError(f"h has shape {self.h.shape}, expected {(self.n_orb,) * 2}")
        if self.g.shape != (self.n_orb,) * 4:
            raise ValueError(f"g has shape {self.g.shape}, expected {(self.n_orb,) * 4}")
        if not (0 <= self.n_beta <= self.n_alpha <= self.n_orb):
            raise ValueError(
                f"bad electron counts n_alpha={self.n_alpha}, n_beta={self.n_beta} "
                f"for n_orb={self.n_orb}"
            )
        if self.orb_irreps is not None:
            self.orb_irreps = tuple(int(x) for x in self.orb_irreps)
            if len(self.orb_irreps) != self.n_orb:
                raise ValueError("orb_irreps length does not match n_orb")
            if any(x < 0 for x in self.orb_irreps):
                raise ValueError("orb_irreps labels must be non-negative")
        self.h.flags.writeable = False
        self.g.flags.writeable = False

    @property
    def n_elec(self) -> int:
        return self.n_alpha + self.n_beta

    @property
    def ms2(self) -> int:
        return self.n_alpha - self.n_beta

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_orb

    def with_sector(self, n_alpha: int, n_beta: int,
                    target_irrep: int | None = None) -> "MolecularIntegrals":
        """Copy with a different electron sector (and optionally target irrep)."""
        return replace(
            self,
            n_alpha=n_alpha,
            n_beta=n_beta,
            target_irrep=self.target_irrep if target_irrep is None else target_irrep,
        )


@dataclass(frozen=True)
class SymmetryViolation:
    kind: str  # "h" or "g"
    indices: tuple[int, ...]
    mirror: tuple[int, ...]
    delta: float


def _parse_header(lines: list[str]) -> tuple[dict, int]:
    """Parse the namelist header; return (fields, index of its last line)."""
    header_parts: list[str] = []
    end_line = None
    for ln, raw in enumerate(lines, start=1):
        body = raw.strip()
        if ln == 1:
            if not body.startswith("&"):
                raise FcidumpError("header must start with a namelist (&FCI ...)", line=1)
            first, _, rest = body.partition(" ")
            if "=" in first:  # glued form like &FCI,NORB=...
                body = body.lstrip("&").partition(",")[2] if "," in first else body.lstrip("&")
            else:
                body = rest
        terminated = False
        upper = body.upper()
        for token in ("&END", "/"):
            if token in upper:
                body = body[: upper.index(token)]
                terminated = True
                break
        header_parts.append(body)
        if terminated:
            end_line = ln
            break
    if end_line is None:
        raise FcidumpError("header never terminated by &END or /", line=len(lines))

    text = ",".join(header_parts)
    fields: dict[str, str] = {}
    key = None
    for chunk in text.replace("\n", ",").split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" in chunk:
            key, _, val = chunk.partition("=")
            key = key.strip().upper()
            fields[key] = val.strip()
        elif key is not None:
            # continuation of a comma-separated list (ORBSYM)
            fields[key] += "," + chunk
    for required in ("NORB", "NELEC", "MS2"):
        if required not in fields:
            raise FcidumpError(f"header missing {required}", line=end_line)
    return fields, end_line


def parse_fcidump(source: str | TextIO) -> MolecularIntegrals:
    """Parse an FCIDUMP character stream into :class:`MolecularIntegrals`.

    Index sentinels: ``i=j=k=l=0`` carries the core energy, ``k=l=0`` a
    one-electron entry, otherwise a two-electron entry (ij|kl). Duplicate
    records overwrite earlier ones with a warning. Errors report the
    1-based line number.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    lines = source.read().splitlines()
    if not lines:
        raise FcidumpError("empty input", line=1)

    fields, header_end = _parse_header(lines)
    try:
        n_orb = int(fields["NORB"])
        n_elec = int(fields["NELEC"])
        ms2 = int(fields["MS2"])
    except ValueError as exc:
        raise FcidumpError(f"non-numeric header field: {exc}", line=1) from None
    if n_orb < 1:
        raise FcidumpError("NORB must be positive", line=1)
    if (n_elec + ms2) % 2 != 0:
        raise FcidumpError(f"NELEC={n_elec} and MS2={ms2} have inconsistent parity", line=1)
    n_alpha = (n_elec + ms2) // 2
    n_beta = (n_elec - ms2) // 2

    orb_irreps = None
    if "ORBSYM" in fields:
        try:
            syms = [int(tok) for tok in fields["ORBSYM"].split(",") if tok.strip()]
        except ValueError:
            raise FcidumpError("non-numeric ORBSYM entry", line=1) from None
        if len(syms) != n_orb:
            raise FcidumpError(f"ORBSYM lists {len(syms)} labels for NORB={n_orb}", line=1)
        if any(s < 1 for s in syms):
            raise FcidumpError("ORBSYM labels must be >= 1", line=1)
        orb_irreps = tuple(s - 1 for s in syms)
    target_irrep = None
    if orb_irreps is not None:
        target_irrep = int(fields.get("ISYM", "1")) - 1

    core_energy = 0.0
    h = np.zeros((n_orb, n_orb))
    g = np.zeros((n_orb,) * 4)
    seen_h: set[tuple[int, int]] = set()
    seen_g: set[tuple[int, int, int, int]] = set()

    for ln, raw in enumerate(lines[header_end:], start=header_end + 1):
        tokens = raw.split()
        if not tokens:
            continue
        if len(tokens) != 5:
            raise FcidumpError(f"expected 'value i j k l', got {len(tokens)} fields", line=ln)
        try:
            value = float(tokens[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(t) for t in tokens[1:])
        except ValueError:
            raise FcidumpError(f"non-numeric field in record {raw!r}", line=ln) from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > n_orb:
                raise FcidumpError(f"orbital index {idx} out of range [0, {n_orb}]", line=ln)
        if i == j == k == l == 0:
            core_energy = value
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FcidumpError("one-electron record needs both i and j", line=ln)
            key = (min(i, j) - 1, max(i, j) - 1)
            if key in seen_h:
                warnings.warn(f"duplicate h entry {key} at line {ln}; last occurrence wins")
            seen_h.add(key)
            h[i - 1, j - 1] = value
            h[j - 1, i - 1] = value
        else:
            if 0 in (i, j, k, l):
                raise FcidumpError("two-electron record with a zero index", line=ln)
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            key = _canonical_g_index(p, q, r, s)
            if key in seen_g:
                warnings.warn(f"duplicate g entry {key} at line {ln}; last occurrence wins")
            seen_g.add(key)
            for a, b, c, d in _g_images(p, q, r, s):
                g[a, b, c, d] = value

    return MolecularIntegrals(
        n_orb=n_orb,
        n_alpha=n_alpha,
        n_beta=n_beta,
        core_energy=core_energy,
        h=h,
        g=g,
        orb_irreps=orb_irreps,
        target_irrep=target_irrep,
    )


def read_fcidump(path) -> MolecularIntegrals:
    with open(path) as fh:
        return parse_fcidump(fh)


def _g_images(p: int, q: int, r: int, s: int) -> set[tuple[int, int, int, int]]:
    """The 8 chemists'-notation images of one (pq|rs) index quadruple."""
    return {
        (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
        (r, s, p, q), (r, s, q, p), (s, r, p, q), (s, r, q, p),
    }


def _canonical_g_index(p: int, q: int, r: int, s: int) -> tuple[int, int, int, int]:
    return min(_g_images(p, q, r, s))


def write_fcidump(ints: MolecularIntegrals) -> str:
    """Serialize to FCIDUMP text; exact (repr-precision) round-trip."""
    out = [f"&FCI NORB={ints.n_orb},NELEC={ints.n_elec},MS2={ints.ms2},"]
    if ints.orb_irreps is not None:
        out.append(" ORBSYM=" + ",".join(str(s + 1) for s in ints.orb_irreps) + ",")
        out.append(f" ISYM={(ints.target_irrep or 0) + 1},")
    out.append("&END")

    def fmt(value: float, i: int, j: int, k: int, l: int) -> str:
        return f"{float(value)!r} {i} {j} {k} {l}"

    n = ints.n_orb
    emitted: set[tuple[int, int, int, int]] = set()
    for p in range(n):
        for q in range(p + 1):
            for r in range(p + 1):
                for s in range(r + 1):
                    key = _canonical_g_index(p, q, r, s)
                    if key in emitted:
                        continue
                    emitted.add(key)
                    value = ints.g[p, q, r, s]
                    if value != 0.0:
                        out.append(fmt(value, p + 1, q + 1, r + 1, s + 1))
    for p in range(n):
        for q in range(p + 1):
            if ints.h[p, q] != 0.0:
                out.append(fmt(ints.h[p, q], p + 1, q + 1, 0, 0))
    out.append(fmt(ints.core_energy, 0, 0, 0, 0))
    return "\n".join(out) + "\n"


def validate_integral_symmetry(ints: MolecularIntegrals,
                               tol: float = SYMMETRY_TOL) -> list[SymmetryViolation]:
    """List every h pair or g quadruple violating permutational symmetry.

    An empty list means the tensors satisfy ``h[p,q] == h[q,p]`` and the
    8-fold (ij|kl) symmetry within ``tol``.
    """
    violations: list[SymmetryViolation] = []
    n = ints.n_orb
    for p in range(n):
        for q in range(p):
            delta = abs(ints.h[p, q] - ints.h[q, p])
            if delta > tol:
                violations.append(SymmetryViolation("h", (p, q), (q, p), delta))
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    ref = (p, q, r, s)
                    for img in sorted(_g_images(p, q, r, s)):
                        if img <= ref:
                            continue
                        delta = abs(ints.g[ref] - ints.g[img])
                        if delta > tol:
                            violations.append(SymmetryViolation("g", ref, img, delta))
    return violations


def apply_orbital_permutation(ints: MolecularIntegrals,
                              perm: Sequence[int]) -> MolecularIntegrals:
    """Relabel orbitals: output index ``a`` holds input orbital ``perm[a]``.

    ``h'[a, b] = h[perm[a], perm[b]]`` and analogously for g and the irrep
    labels; the core energy is unchanged.
    """
    perm = list(perm)
    if len(perm) != ints.n_orb or sorted(perm) != list(range(ints.n_orb)):
        raise ValueError(f"not a permutation of 0..{ints.n_orb - 1}: {perm}")
    idx = np.asarray(perm)
    irreps = None
    if ints.orb_irreps is not None:
        irreps = tuple(ints.orb_irreps[p] for p in perm)
    return MolecularIntegrals(
        n_orb=ints.n_orb,
        n_alpha=ints.n_alpha,
        n_beta=ints.n_beta,
        core_energy=ints.core_energy,
        h=ints.h[np.ix_(idx, idx)],
        g=ints.g[np.ix_(idx, idx, idx, idx)],
        orb_irreps=irreps,
        target_irrep=ints.target_irrep,
    )


def invert_permutation(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for a, p in enumerate(perm):
        inv[p] = a
    return inv
