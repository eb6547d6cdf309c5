"""Sampling-based selected CI driven by simulated real-time evolution."""

from .determinants import Determinant, DeterminantSet, OccupationVector
from .integrals import MolecularIntegrals, parse_fcidump, read_fcidump, write_fcidump
from .pauli import PauliString, PauliSum, jordan_wigner, order_terms, truncate_by_locality
from .sampler import BitstringCounts, NoiseSpec, sample_counts
from .sci import (CIResult, SubspaceHamiltonian, build_subspace_matrix,
                  casci_ground_state, diagonalize_subspace,
                  enumerate_cas_determinants, slater_condon_element)
from .statevector import EvolutionParams, StateVector
from .driver import RunConfig, RunReport, run_pipeline

__all__ = [
    "Determinant", "DeterminantSet", "OccupationVector",
    "MolecularIntegrals", "parse_fcidump", "read_fcidump", "write_fcidump",
    "PauliString", "PauliSum", "jordan_wigner", "order_terms", "truncate_by_locality",
    "BitstringCounts", "NoiseSpec", "sample_counts",
    "CIResult", "SubspaceHamiltonian", "build_subspace_matrix", "casci_ground_state",
    "diagonalize_subspace", "enumerate_cas_determinants", "slater_condon_element",
    "EvolutionParams", "StateVector",
    "RunConfig", "RunReport", "run_pipeline",
]

__version__ = "0.1.0"
