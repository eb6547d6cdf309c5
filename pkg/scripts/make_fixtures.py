"""Generate the FCIDUMP test fixtures with the in-tree electronic-structure
oracle. Run from the repository root:

    python3 scripts/make_fixtures.py [--with-naphthalene]

Geometries: H2 at its STO-3G equilibrium bond length; H2O at the standard
experimental geometry (r(OH) = 0.9572 A, HOH angle 104.52 deg); benzene and
naphthalene at published B3LYP/6-31G* planar-optimized coordinates. Active
spaces: H2 full, H2O (6e,5o) frozen-core with no symmetry labels, benzene
(6e,6o) and naphthalene (10e,10o) valence pi spaces with D2h labels.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))
from fixture_oracle import (active_space, build_molecule, export_fcidump,
                            label_orbitals, run_rhf)

DATA = Path(__file__).parent.parent / "tests" / "data"

H2 = [("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 0.7414))]

H2O = [("O", (0.0, 0.0, 0.1173)),
       ("H", (0.0, 0.7572, -0.4692)),
       ("H", (0.0, -0.7572, -0.4692))]

BENZENE = [
    ("C", (0.000000, 1.396602, 0.0)), ("C", (0.000000, -1.396602, 0.0)),
    ("C", (1.209493, 0.698301, 0.0)), ("C", (1.209493, -0.698301, 0.0)),
    ("C", (-1.209493, 0.698301, 0.0)), ("C", (-1.209493, -0.698301, 0.0)),
    ("H", (0.000000, 2.483720, 0.0)), ("H", (0.000000, -2.483720, 0.0)),
    ("H", (2.150965, 1.241860, 0.0)), ("H", (2.150965, -1.241860, 0.0)),
    ("H", (-2.150965, 1.241860, 0.0)), ("H", (-2.150965, -1.241860, 0.0)),
]

NAPHTHALENE = [
    ("C", (0.0, 0.000000, 0.717063)), ("C", (0.0, 0.000000, -0.717063)),
    ("C", (0.0, 1.244791, 1.402547)), ("C", (0.0, 1.244791, -1.402547)),
    ("C", (0.0, -1.244791, 1.402547)), ("C", (0.0, -1.244791, -1.402547)),
    ("C", (0.0, 2.433546, 0.708438)), ("C", (0.0, 2.433546, -0.708438)),
    ("C", (0.0, -2.433546, 0.708438)), ("C", (0.0, -2.433546, -0.708438)),
    ("H", (0.0, 1.242227, 2.490221)), ("H", (0.0, 1.242227, -2.490221)),
    ("H", (0.0, -1.242227, 2.490221)), ("H", (0.0, -1.242227, -2.490221)),
    ("H", (0.0, 3.378258, 1.245514)), ("H", (0.0, 3.378258, -1.245514)),
    ("H", (0.0, -3.378258, 1.245514)), ("H", (0.0, -3.378258, -1.245514)),
]


def pi_active_space(scf, labels, plane_bit: int):
    """Orbitals odd under the molecular-plane mirror, plus the frozen rest."""
    n_mo = scf.mo_coeffs.shape[1]
    nocc = scf.mol.n_elec // 2
    active = [i for i in range(n_mo) if labels[i] & plane_bit]
    frozen = [i for i in range(nocc) if i not in active]
    return frozen, active


def make_h2():
    scf = run_rhf(build_molecule(H2))
    core, h, g = active_space(scf, frozen=[], active=[0, 1])
    export_fcidump(DATA / "h2_sto3g.fcidump", core, h, g, n_elec=2, ms2=0)
    print(f"h2_sto3g: RHF {scf.energy:.8f}")


def make_h2o():
    scf = run_rhf(build_molecule(H2O))
    core, h, g = active_space(scf, frozen=[0, 1], active=[2, 3, 4, 5, 6])
    export_fcidump(DATA / "h2o_6e5o_sto3g.fcidump", core, h, g,
                   n_elec=6, ms2=0, orbsym=[1] * 5, isym=1)
    print(f"h2o_6e5o_sto3g: RHF {scf.energy:.8f}")


def make_benzene():
    scf = run_rhf(build_molecule(BENZENE))
    labels = label_orbitals(scf)
    frozen, active = pi_active_space(scf, labels, plane_bit=4)
    assert len(active) == 6, active
    core, h, g = active_space(scf, frozen, active)
    orbsym = [int(labels[i]) + 1 for i in active]
    export_fcidump(DATA / "benzene_6e6o_sto3g.fcidump", core, h, g,
                   n_elec=6, ms2=0, orbsym=orbsym, isym=1)
    print(f"benzene_6e6o_sto3g: RHF {scf.energy:.8f}, ORBSYM {orbsym}")


def make_naphthalene():
    t0 = time.time()
    scf = run_rhf(build_molecule(NAPHTHALENE))
    labels = label_orbitals(scf)
    frozen, active = pi_active_space(scf, labels, plane_bit=1)
    assert len(active) == 10, active
    core, h, g = active_space(scf, frozen, active)
    orbsym = [int(labels[i]) + 1 for i in active]
    export_fcidump(DATA / "naphthalene_10e10o_sto3g.fcidump", core, h, g,
                   n_elec=10, ms2=0, orbsym=orbsym, isym=1)
    print(f"naphthalene_10e10o_sto3g: RHF {scf.energy:.8f}, ORBSYM {orbsym} "
          f"[{time.time() - t0:.0f}s]")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--with-naphthalene", action="store_true",
                        help="also build the large 20-qubit fixture")
    args = parser.parse_args()
    DATA.mkdir(parents=True, exist_ok=True)
    make_h2()
    make_h2o()
    make_benzene()
    if args.with_naphthalene:
        make_naphthalene()
