"""Command-line interface.

Subcommands: run (full pipeline from a config file), casci (reference
energy), truncate (locality truncation survey), sample (evolve and dump
counts), baseline (random determinant selection), report (pretty-print
saved reports, optionally a singlet-triplet pair).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .determinants import DeterminantSet
from .driver import (HARTREE_TO_KCAL, RunConfig, parse_initial_state,
                     random_baseline_select, run_pipeline, singlet_triplet_gap_kcal)
from .integrals import read_fcidump
from .pauli import count_sq_terms, jordan_wigner, matrix_in_basis, order_terms, truncate_by_locality
from .sampler import derive_seed, sample_counts
from .sci import (build_subspace_matrix, casci_ground_state, diagonalize_subspace,
                  enumerate_cas_determinants, hartree_fock_determinant,
                  s_squared_expectation, slater_condon_element)
from .statevector import EvolutionParams, evolve_k_steps, prepare_superposition_state

import numpy as np
import scipy.linalg


def _cmd_run(args) -> int:
    cfg = RunConfig.from_file(args.config)
    report = run_pipeline(cfg)
    sys.stdout.write(report.to_text())
    return 0


def _cmd_casci(args) -> int:
    ints = read_fcidump(args.fcidump)
    if args.ms2 is not None:
        n_alpha = (ints.n_elec + args.ms2) // 2
        ints = ints.with_sector(n_alpha, ints.n_elec - n_alpha)
    result = casci_ground_state(ints, irrep_filter=args.irrep_filter,
                                backend=args.backend)
    print(f"determinants : {len(result.basis)}")
    print(f"energy       : {result.energy:.10f} Ha")
    print(f"<S^2>        : {s_squared_expectation(result):.8f}")
    d_hf = hartree_fock_determinant(ints)
    e_hf = slater_condon_element(d_hf, d_hf, ints)
    print(f"HF reference : {e_hf:.10f} Ha")
    print(f"correlation  : {(result.energy - e_hf):.10f} Ha")
    return 0


def _cmd_truncate(args) -> int:
    ints = read_fcidump(args.fcidump)
    total = count_sq_terms(ints)
    full = jordan_wigner(ints)
    cas = enumerate_cas_determinants(ints, irrep_filter=False)
    fidelity_ok = len(cas) <= args.fidelity_limit
    ground_full = None
    if fidelity_ok:
        idx = cas.basis_indices()
        mat = matrix_in_basis(full, idx)
        _, vecs = scipy.linalg.eigh(mat)
        ground_full = vecs[:, 0]
    print(f"{'m':>4} {'terms':>8} {'pauli':>8} {'fidelity':>12}")
    for m in args.m:
        truncated, kept = truncate_by_locality(ints, m)
        if fidelity_ok:
            mat_t = matrix_in_basis(truncated, cas.basis_indices())
            _, vecs_t = scipy.linalg.eigh(mat_t)
            fid = float(abs(ground_full @ vecs_t[:, 0]) ** 2)
            print(f"{m:>4} {kept:>8} {len(truncated):>8} {fid:>12.6f}")
        else:
            print(f"{m:>4} {kept:>8} {len(truncated):>8} {'skipped':>12}")
    print(f"untruncated second-quantized terms: {total}")
    return 0


def _cmd_sample(args) -> int:
    ints = read_fcidump(args.fcidump)
    if args.init:
        state = parse_initial_state(args.init)
    else:
        state = [(1.0, hartree_fock_determinant(ints))]
    sector = {(d.n_alpha, d.n_beta) for _, d in state}.pop()
    ints = ints.with_sector(*sector)
    hq = jordan_wigner(ints)
    terms = order_terms(hq, args.ordering)
    psi0 = prepare_superposition_state(state, ints.n_qubits)
    evolved = evolve_k_steps(psi0, terms, EvolutionParams(dt=args.dt, k_max=args.k_max))
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for k, st in enumerate(evolved, start=1):
        counts = sample_counts(st, args.shots, derive_seed(args.seed, "cli", k))
        path = outdir / f"counts_k{k}.txt"
        path.write_text(counts.to_lines())
        print(f"k={k}: {len(counts.counts)} distinct strings -> {path}")
    return 0


def _cmd_baseline(args) -> int:
    ints = read_fcidump(args.fcidump)
    selected = random_baseline_select(ints, args.n_dets, args.seed)
    sub = build_subspace_matrix(selected, ints)
    result = diagonalize_subspace(sub, 1, "auto")[0]
    print(f"selected determinants : {len(selected)}")
    print(f"subspace energy       : {result.energy:.10f} Ha")
    if args.casci:
        ref = casci_ground_state(ints, irrep_filter=ints.orb_irreps is not None)
        err = result.energy - ref.energy
        print(f"CAS-CI reference      : {ref.energy:.10f} Ha")
        print(f"error                 : {err:.3e} Ha = {err * HARTREE_TO_KCAL:.4f} kcal/mol")
    if args.out:
        Path(args.out).write_text(selected.to_lines(ints.n_orb))
    return 0


def _read_kv(path: str) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        if "=" in line:
            key, _, val = line.partition("=")
            out[key.strip()] = val.strip()
    return out


def _cmd_report(args) -> int:
    first = _read_kv(args.report)
    print(Path(args.report).name)
    for key in ("final_energy", "n_determinants", "casci_energy",
                "pct_determinants", "pct_correlation", "error_vs_casci_kcal",
                "s_squared"):
        if key in first:
            print(f"  {key} = {first[key]}")
    if args.triplet:
        second = _read_kv(args.triplet)
        e_s = float(first["final_energy"])
        e_t = float(second["final_energy"])
        gap = singlet_triplet_gap_kcal(e_s, e_t)
        print(f"singlet-triplet gap : {gap:+.4f} kcal/mol")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsci",
        description="Sampled selected-CI with simulated real-time evolution")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="full pipeline from a config file")
    p_run.add_argument("config")
    p_run.set_defaults(func=_cmd_run)

    p_cas = sub.add_parser("casci", help="active-space exact diagonalization")
    p_cas.add_argument("fcidump")
    p_cas.add_argument("--irrep-filter", action="store_true")
    p_cas.add_argument("--ms2", type=int, default=None,
                       help="override the spin sector (2*Ms)")
    p_cas.add_argument("--backend", default="auto",
                       choices=("auto", "dense", "davidson"))
    p_cas.set_defaults(func=_cmd_casci)

    p_tr = sub.add_parser("truncate", help="locality truncation survey")
    p_tr.add_argument("fcidump")
    p_tr.add_argument("--m", type=int, nargs="+", required=True)
    p_tr.add_argument("--fidelity-limit", type=int, default=20000,
                      help="skip ground-state fidelity above this CAS dimension")
    p_tr.set_defaults(func=_cmd_truncate)

    p_sm = sub.add_parser("sample", help="evolve an initial state and dump counts")
    p_sm.add_argument("fcidump")
    p_sm.add_argument("--dt", type=float, default=1.0)
    p_sm.add_argument("--k-max", type=int, default=10)
    p_sm.add_argument("--shots", type=int, default=100000)
    p_sm.add_argument("--seed", type=int, default=0)
    p_sm.add_argument("--ordering", default="magnitude")
    p_sm.add_argument("--init", default=None,
                      help="coeff alpha_bits beta_bits [; ...] (default: aufbau)")
    p_sm.add_argument("--outdir", default="counts")
    p_sm.set_defaults(func=_cmd_sample)

    p_bl = sub.add_parser("baseline", help="random symmetry-preserving selection")
    p_bl.add_argument("fcidump")
    p_bl.add_argument("--n-dets", type=int, required=True)
    p_bl.add_argument("--seed", type=int, default=0)
    p_bl.add_argument("--casci", action="store_true", help="also print the reference")
    p_bl.add_argument("--out", default=None, help="write the selection to a file")
    p_bl.set_defaults(func=_cmd_baseline)

    p_rp = sub.add_parser("report", help="pretty-print saved key/value reports")
    p_rp.add_argument("report")
    p_rp.add_argument("--triplet", default=None,
                      help="second report treated as the triplet partner")
    p_rp.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface stage errors as nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
