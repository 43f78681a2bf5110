#!/usr/bin/env python3
# Copyright 2026 The jointmeas Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Exports molecular Hamiltonians in the Majorana JSON format read by jm.

Upstream tooling only: requires pyscf, openfermion and openfermionpyscf.
Majorana index 2p+1 (1-based) is a_p + a_p^dag, index 2p+2 is
i(a_p^dag - a_p); terms are stored for gamma_A = i^{|A|/2} prod gamma_i.
"""

import argparse
import json
import math

import numpy as np
import openfermion as of
import scipy.sparse.linalg
from openfermionpyscf import run_pyscf

DISPLAY_NAMES = {"lih": "LiH", "beh2": "BeH2"}

MOLECULES = {
    "h2": ("6-31g", [("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 0.7414))]),
    "lih": ("sto-3g", [("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.5949))]),
    "beh2": ("sto-3g", [("Be", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.3264)),
                        ("H", (0.0, 0.0, -1.3264))]),
    "h2o": ("sto-3g", [("H", (0.0, 0.7572, -0.4692)),
                       ("H", (0.0, -0.7572, -0.4692)),
                       ("O", (0.0, 0.0, 0.1173))]),
    "nh3": ("sto-3g", [("N", (0.0, 0.0, 0.0)), ("H", (0.0, -0.9377, -0.3816)),
                       ("H", (0.8121, 0.4689, -0.3816)),
                       ("H", (-0.8121, 0.4689, -0.3816))]),
}


def export(name, cutoff):
    basis, geometry = MOLECULES[name]
    mol = of.MolecularData(geometry, basis, multiplicity=1, charge=0)
    mol = run_pyscf(mol, run_scf=True)
    fermion = of.get_fermion_operator(mol.get_molecular_hamiltonian())
    majorana = of.get_majorana_operator(fermion)

    n_qubits = mol.n_qubits
    constant = 0.0
    terms = []
    for indices, coeff in sorted(majorana.terms.items(), key=lambda t: (len(t[0]), t[0])):
        k = len(indices)
        if k % 2:
            raise ValueError("odd Majorana term")
        value = complex(coeff) * (-1j) ** (k // 2)
        if abs(value.imag) > 1e-10:
            raise ValueError(f"non-real coefficient for {indices}: {value}")
        if k == 0:
            constant += value.real
            continue
        if abs(value.real) <= cutoff:
            continue
        terms.append({"indices": [i + 1 for i in indices], "coeff": value.real})

    sparse = of.get_sparse_operator(of.jordan_wigner(fermion), n_qubits=n_qubits)
    energy = scipy.sparse.linalg.eigsh(sparse, k=1, which="SA")[0][0]

    return {
        "schema_version": 1,
        "n_modes": n_qubits,
        "constant": constant,
        "terms": terms,
        "reference_energy": float(energy),
        "metadata": {
            "molecule": DISPLAY_NAMES.get(name, name.upper()),
            "basis": basis,
            "geometry": [{"atom": a, "xyz": list(x)} for a, x in geometry],
            "units": "Hartree",
        },
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("molecules", nargs="*", default=sorted(MOLECULES))
    parser.add_argument("--outdir", default="data/hamiltonians")
    parser.add_argument("--cutoff", type=float, default=1e-12)
    args = parser.parse_args()
    for name in args.molecules:
        doc = export(name, args.cutoff)
        path = f"{args.outdir}/{name}.json"
        with open(path, "w") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")
        print(f"{path}: {doc['n_modes']} modes, {len(doc['terms'])} terms, "
              f"E0 = {doc['reference_energy']:.10f}")


if __name__ == "__main__":
    main()
