"""End-to-end pipeline: evolve, sample, recover, complete, diagonalize.

Per time step k the subspace is built from all measurements accumulated up
to k (cumulative bases make the per-step energies monotone). Configuration
recovery, when enabled, iterates recover -> complete -> diagonalize per
step until the determinant set stops changing, feeding each step's orbital
occupations forward.
"""

from __future__ import annotations

import configparser
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .determinants import Determinant, DeterminantSet, OccupationVector
from .integrals import MolecularIntegrals, read_fcidump
from .pauli import count_sq_terms, jordan_wigner, order_terms, truncate_by_locality
from .recovery import filter_by_particle_number, retained_shots, sccr_pass, spin_complete
from .sampler import (BitstringCounts, NoiseSpec, derive_seed, inject_readout_noise,
                      merge_counts, sample_counts)
from .sci import (CIResult, build_subspace_matrix, casci_ground_state,
                  determinant_irrep, diagonalize_subspace, enumerate_cas_determinants,
                  hartree_fock_determinant, orbital_occupations, s_squared_expectation,
                  slater_condon_element)
from .statevector import EvolutionParams, evolve_k_steps, prepare_superposition_state

__all__ = [
    "RunConfig",
    "RunReport",
    "KPoint",
    "run_pipeline",
    "random_baseline_select",
    "report_results",
    "HARTREE_TO_KCAL",
]

HARTREE_TO_KCAL = 627.5094740631
REFERENCE_DIM_LIMIT = 20000

InitialState = list[tuple[float, Determinant]]


@dataclass
class RunConfig:
    fcidump: str
    initial_states: list[InitialState] = field(default_factory=list)
    dt: float = 1.0
    k_max: int = 10
    shots: int = 100000
    seed: int = 0
    ordering: str = "magnitude"
    locality: int | None = None
    noise: NoiseSpec | None = None
    sccr: bool = False
    sccr_max_iter: int = 10
    irrep_filter: bool = False
    spin_completion: bool = True
    backend: str = "auto"
    compute_reference: bool = True
    reference_dim_limit: int = REFERENCE_DIM_LIMIT
    output_text: str | None = None
    output_kv: str | None = None

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be at least 1")
        if self.k_max < 1:
            raise ValueError("k_max must be at least 1")
        for state in self.initial_states:
            if not state or all(c == 0 for c, _ in state):
                raise ValueError("initial state with all-zero coefficients")

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        read = parser.read(path)
        if not read:
            raise FileNotFoundError(path)
        sys_sec = parser["system"]
        run = parser["run"] if parser.has_section("run") else {}

        def flag(key: str, default: bool) -> bool:
            raw = run.get(key, None)
            if raw is None:
                return default
            return raw.strip().lower() in ("1", "on", "true", "yes")

        locality = run.get("locality", "").strip() if hasattr(run, "get") else ""
        noise = None
        flip = float(run.get("noise_flip_prob", "0") or 0)
        if flip > 0:
            noise = NoiseSpec(flip_prob=flip, seed=int(run.get("noise_seed", "0") or 0))
        initial_states: list[InitialState] = []
        if parser.has_section("initial"):
            for _, raw in parser.items("initial"):
                initial_states.append(parse_initial_state(raw))
        out_text = out_kv = None
        if parser.has_section("output"):
            out_text = parser["output"].get("text") or None
            out_kv = parser["output"].get("kv") or None
        return cls(
            fcidump=sys_sec["fcidump"],
            initial_states=initial_states,
            dt=float(run.get("dt", "1.0")),
            k_max=int(run.get("k_max", "10")),
            shots=int(run.get("shots", "100000")),
            seed=int(run.get("seed", "0")),
            ordering=run.get("ordering", "magnitude").strip(),
            locality=int(locality) if locality else None,
            noise=noise,
            sccr=flag("sccr", False),
            sccr_max_iter=int(run.get("sccr_max_iter", "10")),
            irrep_filter=flag("irrep_filter", False),
            spin_completion=flag("spin_completion", True),
            backend=run.get("backend", "auto").strip(),
            compute_reference=flag("compute_reference", True),
            output_text=out_text,
            output_kv=out_kv,
        )


def parse_initial_state(raw: str) -> InitialState:
    """Parse `coeff alpha_bits beta_bits [; coeff alpha beta ...]`."""
    state: InitialState = []
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        coeff, alpha, beta = chunk.split()
        state.append((float(coeff), Determinant(int(alpha, 2), int(beta, 2))))
    if not state:
        raise ValueError(f"empty initial-state spec: {raw!r}")
    return state


def _state_fingerprint(state: InitialState) -> str:
    return ";".join(f"{c!r}:{d.alpha_mask}:{d.beta_mask}" for c, d in state)


@dataclass
class KPoint:
    k: int
    n_determinants: int
    energy: float
    s_squared: float
    shots_total: int
    shots_usable: int


@dataclass
class RunReport:
    per_k: list[KPoint]
    final_energy: float
    n_determinants: int
    s_squared: float
    hf_energy: float
    casci_energy: float | None
    casci_n_determinants: int | None
    pct_determinants: float | None
    pct_correlation: float | None
    error_vs_casci_kcal: float | None
    shots_total: int
    shots_usable: int
    kept_sq_terms: int
    total_sq_terms: int
    timings: dict[str, float]

    def to_text(self) -> str:
        lines = ["pipeline report", "==============="]
        lines.append(f"{'k':>3} {'dets':>8} {'energy/Ha':>18} {'<S^2>':>10} "
                     f"{'shots':>10} {'usable':>10}")
        for p in self.per_k:
            lines.append(f"{p.k:>3} {p.n_determinants:>8} {p.energy:>18.10f} "
                         f"{p.s_squared:>10.6f} {p.shots_total:>10} {p.shots_usable:>10}")
        lines.append("")
        lines.append(f"final energy        : {self.final_energy:.10f} Ha "
                     f"({self.n_determinants} determinants)")
        lines.append(f"HF reference        : {self.hf_energy:.10f} Ha")
        if self.casci_energy is not None:
            lines.append(f"CAS-CI reference    : {self.casci_energy:.10f} Ha "
                         f"({self.casci_n_determinants} determinants)")
            lines.append(f"error vs CAS-CI     : {self.error_vs_casci_kcal:+.4f} kcal/mol")
            lines.append(f"%determinants       : {self.pct_determinants:.2f}")
            if self.pct_correlation is not None:
                lines.append(f"%correlation energy : {self.pct_correlation:.2f}")
            else:
                lines.append("%correlation energy : undefined (E_HF = E_CASCI)")
        lines.append(f"<S^2>               : {self.s_squared:.8f}")
        lines.append(f"shots               : {self.shots_usable}/{self.shots_total} usable")
        if self.kept_sq_terms != self.total_sq_terms:
            lines.append(f"hamiltonian terms   : {self.kept_sq_terms}/{self.total_sq_terms} "
                         "kept after locality truncation")
        for stage, wall in self.timings.items():
            lines.append(f"time[{stage}]: {wall:.3f} s")
        return "\n".join(lines) + "\n"

    def to_kv(self) -> str:
        pairs: list[tuple[str, object]] = []
        for p in self.per_k:
            prefix = f"k{p.k}"
            pairs += [(f"{prefix}.n_determinants", p.n_determinants),
                      (f"{prefix}.energy", p.energy),
                      (f"{prefix}.s_squared", p.s_squared),
                      (f"{prefix}.shots_total", p.shots_total),
                      (f"{prefix}.shots_usable", p.shots_usable)]
        pairs += [
            ("final_energy", self.final_energy),
            ("n_determinants", self.n_determinants),
            ("s_squared", self.s_squared),
            ("hf_energy", self.hf_energy),
            ("casci_energy", self.casci_energy),
            ("casci_n_determinants", self.casci_n_determinants),
            ("pct_determinants", self.pct_determinants),
            ("pct_correlation", self.pct_correlation),
            ("error_vs_casci_kcal", self.error_vs_casci_kcal),
            ("shots_total", self.shots_total),
            ("shots_usable", self.shots_usable),
            ("kept_sq_terms", self.kept_sq_terms),
            ("total_sq_terms", self.total_sq_terms),
        ]
        for stage, wall in self.timings.items():
            pairs.append((f"time.{stage}", wall))
        return "\n".join(f"{k} = {v!r}" for k, v in pairs) + "\n"


def report_results(per_k: list[KPoint], hf_energy: float,
                   casci_energy: float | None, casci_n_determinants: int | None,
                   s_squared: float, kept_sq_terms: int, total_sq_terms: int,
                   timings: dict[str, float] | None = None) -> RunReport:
    """Assemble the report with the derived percentage observables.

    %determinants = 100 * |selected| / |CAS|, %correlation =
    100 * (E_HF - E) / (E_HF - E_CASCI); the latter is undefined when the
    HF and CAS-CI references coincide.
    """
    if not per_k:
        raise ValueError("no per-step results")
    last = per_k[-1]
    pct_dets = pct_corr = err_kcal = None
    if casci_energy is not None and casci_n_determinants:
        pct_dets = 100.0 * last.n_determinants / casci_n_determinants
        err_kcal = (last.energy - casci_energy) * HARTREE_TO_KCAL
        denom = hf_energy - casci_energy
        if abs(denom) > 1e-14:
            pct_corr = 100.0 * (hf_energy - last.energy) / denom
    return RunReport(
        per_k=per_k,
        final_energy=last.energy,
        n_determinants=last.n_determinants,
        s_squared=s_squared,
        hf_energy=hf_energy,
        casci_energy=casci_energy,
        casci_n_determinants=casci_n_determinants,
        pct_determinants=pct_dets,
        pct_correlation=pct_corr,
        error_vs_casci_kcal=err_kcal,
        shots_total=last.shots_total,
        shots_usable=last.shots_usable,
        kept_sq_terms=kept_sq_terms,
        total_sq_terms=total_sq_terms,
        timings=timings or {},
    )


def singlet_triplet_gap_kcal(e_singlet: float, e_triplet: float) -> float:
    """Delta E(S-T) = E_S - E_T in kcal/mol (negative when the singlet is lower)."""
    return (e_singlet - e_triplet) * HARTREE_TO_KCAL


def _irrep_filtered(dets: DeterminantSet, ints: MolecularIntegrals,
                    target: int) -> DeterminantSet:
    return DeterminantSet(d for d in dets if determinant_irrep(d, ints) == target)


class PipelineError(RuntimeError):
    pass


def run_pipeline(cfg: RunConfig) -> RunReport:
    """Execute the full sampling pipeline described by the configuration."""
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    ints = read_fcidump(cfg.fcidump)

    initial_states = cfg.initial_states
    if not initial_states:
        initial_states = [[(1.0, hartree_fock_determinant(ints))]]
    sectors = {(d.n_alpha, d.n_beta) for state in initial_states for _, d in state}
    if len(sectors) != 1:
        raise PipelineError(f"initial states span several sectors: {sorted(sectors)}")
    n_alpha, n_beta = sectors.pop()

    filtering = cfg.irrep_filter and ints.orb_irreps is not None
    target_irrep = None
    if filtering:
        labels = {determinant_irrep(d, ints) for state in initial_states for _, d in state}
        if len(labels) != 1:
            raise PipelineError(f"initial determinants span several irreps: {sorted(labels)}")
        target_irrep = labels.pop()
    ints = ints.with_sector(n_alpha, n_beta, target_irrep=target_irrep)
    timings["setup"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    total_terms = count_sq_terms(ints)
    if cfg.locality is None:
        hq, kept_terms = jordan_wigner(ints), total_terms
    else:
        hq, kept_terms = truncate_by_locality(ints, cfg.locality)
    terms = order_terms(hq, cfg.ordering)
    timings["hamiltonian"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    casci_energy = None
    cas_n = None
    cas_basis = enumerate_cas_determinants(ints, filtering)
    cas_n = len(cas_basis)
    if cfg.compute_reference:
        if cas_n <= cfg.reference_dim_limit:
            casci = diagonalize_subspace(build_subspace_matrix(cas_basis, ints),
                                         1, cfg.backend)[0]
            casci_energy = casci.energy
        else:
            casci_energy = None
    d_hf = hartree_fock_determinant(ints)
    hf_energy = slater_condon_element(d_hf, d_hf, ints)
    timings["reference"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    params = EvolutionParams(dt=cfg.dt, k_max=cfg.k_max, ordering=cfg.ordering)
    counts_per_k: list[list[BitstringCounts]] = [[] for _ in range(cfg.k_max)]
    for state in initial_states:
        tag = _state_fingerprint(state)
        psi0 = prepare_superposition_state(state, ints.n_qubits)
        evolved = evolve_k_steps(psi0, terms, params)
        for k, st in enumerate(evolved, start=1):
            counts = sample_counts(st, cfg.shots, derive_seed(cfg.seed, tag, k))
            if cfg.noise is not None:
                counts = inject_readout_noise(
                    counts, NoiseSpec(cfg.noise.flip_prob,
                                      derive_seed(cfg.noise.seed, tag, k)))
            counts_per_k[k - 1].append(counts)
    timings["evolution+sampling"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    init_dets = [d for state in initial_states for _, d in state]
    init_weights = [c * c for state in initial_states for c, _ in state]
    occ = OccupationVector.from_determinants(init_dets, ints.n_orb, init_weights)

    per_k: list[KPoint] = []
    result: CIResult | None = None
    for k in range(1, cfg.k_max + 1):
        cumulative = merge_counts([c for ks in counts_per_k[:k] for c in ks])
        if cfg.sccr:
            usable = cumulative.shots
            prev_set: DeterminantSet | None = None
            for it in range(cfg.sccr_max_iter):
                dset = sccr_pass(cumulative, n_alpha, n_beta, occ,
                                 derive_seed(cfg.seed, "sccr", k, it))
                if filtering:
                    dset = _irrep_filtered(dset, ints, target_irrep)
                if cfg.spin_completion:
                    dset = spin_complete(dset)
                if prev_set is not None and dset == prev_set:
                    break
                if len(dset) == 0:
                    raise PipelineError("recovery produced an empty determinant set")
                sub = build_subspace_matrix(dset, ints)
                result = diagonalize_subspace(sub, 1, cfg.backend)[0]
                occ = orbital_occupations(result)
                prev_set = dset
            dset = prev_set
        else:
            usable = retained_shots(cumulative, n_alpha, n_beta)
            dset = filter_by_particle_number(cumulative, n_alpha, n_beta)
            if filtering:
                dset = _irrep_filtered(dset, ints, target_irrep)
            if cfg.spin_completion:
                dset = spin_complete(dset)
            if len(dset) == 0:
                raise PipelineError("empty determinant set after filtering "
                                    "(shots/noise mismatch)")
            sub = build_subspace_matrix(dset, ints)
            result = diagonalize_subspace(sub, 1, cfg.backend)[0]
            occ = orbital_occupations(result)
        per_k.append(KPoint(k=k, n_determinants=len(dset), energy=result.energy,
                            s_squared=s_squared_expectation(result),
                            shots_total=cumulative.shots, shots_usable=usable))
    timings["recovery+diagonalization"] = time.perf_counter() - t0

    report = report_results(per_k, hf_energy, casci_energy, cas_n,
                            s_squared=per_k[-1].s_squared,
                            kept_sq_terms=kept_terms, total_sq_terms=total_terms,
                            timings=timings)
    if cfg.output_text:
        Path(cfg.output_text).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.output_text).write_text(report.to_text())
    if cfg.output_kv:
        Path(cfg.output_kv).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.output_kv).write_text(report.to_kv())
    return report


def random_baseline_select(ints: MolecularIntegrals, n_dets: int,
                           seed: int) -> DeterminantSet:
    """Reference-preserving random subspace: the aufbau determinant plus a
    uniform draw (without replacement) from the determinants sharing its
    irrep and particle numbers."""
    if n_dets < 1:
        raise ValueError("n_dets must be at least 1")
    d_hf = hartree_fock_determinant(ints)
    pool_set = enumerate_cas_determinants(ints, irrep_filter=False)
    if ints.orb_irreps is not None:
        target = determinant_irrep(d_hf, ints)
        pool = [d for d in pool_set if determinant_irrep(d, ints) == target and d != d_hf]
    else:
        pool = [d for d in pool_set if d != d_hf]
    if n_dets - 1 > len(pool):
        raise ValueError(f"requested {n_dets} determinants; pool holds {len(pool) + 1}")
    out = DeterminantSet([d_hf])
    rng = np.random.Generator(np.random.Philox(seed))
    for i in rng.permutation(len(pool))[: n_dets - 1]:
        out.add(pool[int(i)])
    return out
