#!/usr/bin/env python3
"""Generate the bundled two-qubit H2 coefficient table (STO-3G, minimal basis).

Closed-form integrals over s-type Gaussians, restricted Hartree-Fock orbitals
fixed by symmetry (bonding g, antibonding u), and the four determinants of the
parity-reduced qubit space:

    |00> vacuum, |10> g^2 (Hartree-Fock), |01> u^2, |11> fully occupied

Leftmost label factor acts on Q1. Output columns match the CSV schema read by
`svqe_core::hamiltonian::load_coefficients`.

usage: python3 tools/h2_sto3g_table.py > crates/core/data/h2_sto3g.csv
"""
import math
import sys

import numpy as np
from scipy.special import erf

ANGSTROM_TO_BOHR = 1.8897261246257702
ALPHA = np.array([3.42525091, 0.62391373, 0.16885540])
COEFF = np.array([0.15432897, 0.53532814, 0.44463454])
NORM = (2.0 * ALPHA / math.pi) ** 0.75

R_GRID = [0.25, 0.40, 0.55, 0.70, 0.80, 0.95, 1.10, 1.30, 1.50, 1.75, 2.00, 2.50]


def boys0(t):
    if t < 1e-12:
        return 1.0 - t / 3.0
    return 0.5 * math.sqrt(math.pi / t) * erf(math.sqrt(t))


def integrals(r_bohr):
    centers = [np.zeros(3), np.array([0.0, 0.0, r_bohr])]
    s = np.zeros((2, 2))
    t = np.zeros((2, 2))
    v = np.zeros((2, 2))
    eri = np.zeros((2, 2, 2, 2))
    prims = [(a, c * n) for a, c, n in zip(ALPHA, COEFF, NORM)]
    for i, ra in enumerate(centers):
        for j, rb in enumerate(centers):
            ab2 = float(np.dot(ra - rb, ra - rb))
            for a, ca in prims:
                for b, cb in prims:
                    p = a + b
                    mu = a * b / p
                    rp = (a * ra + b * rb) / p
                    pre = ca * cb * (math.pi / p) ** 1.5 * math.exp(-mu * ab2)
                    s[i, j] += pre
                    t[i, j] += pre * mu * (3.0 - 2.0 * mu * ab2)
                    for rc in centers:
                        pc2 = float(np.dot(rp - rc, rp - rc))
                        v[i, j] += (-2.0 * math.pi / p * ca * cb
                                    * math.exp(-mu * ab2) * boys0(p * pc2))
    for i, ra in enumerate(centers):
        for j, rb in enumerate(centers):
            for k, rc in enumerate(centers):
                for l, rd in enumerate(centers):
                    total = 0.0
                    ab2 = float(np.dot(ra - rb, ra - rb))
                    cd2 = float(np.dot(rc - rd, rc - rd))
                    for a, ca in prims:
                        for b, cb in prims:
                            p = a + b
                            rp = (a * ra + b * rb) / p
                            for c, cc in prims:
                                for d, cd in prims:
                                    q = c + d
                                    rq = (c * rc + d * rd) / q
                                    pq2 = float(np.dot(rp - rq, rp - rq))
                                    total += (ca * cb * cc * cd
                                              * 2.0 * math.pi ** 2.5
                                              / (p * q * math.sqrt(p + q))
                                              * math.exp(-a * b / p * ab2 - c * d / q * cd2)
                                              * boys0(p * q / (p + q) * pq2))
                    eri[i, j, k, l] = total
    return s, t + v, eri


def qubit_coefficients(r_angstrom):
    r = r_angstrom * ANGSTROM_TO_BOHR
    s, h, eri = integrals(r)
    overlap = s[0, 1]
    c = np.array([
        [1.0 / math.sqrt(2.0 * (1.0 + overlap)), 1.0 / math.sqrt(2.0 * (1.0 - overlap))],
        [1.0 / math.sqrt(2.0 * (1.0 + overlap)), -1.0 / math.sqrt(2.0 * (1.0 - overlap))],
    ])
    h_mo = c.T @ h @ c
    eri_mo = np.einsum("pi,qj,rk,sl,pqrs->ijkl", c, c, c, c, eri)
    e_nuc = 1.0 / r
    hgg, huu = h_mo[0, 0], h_mo[1, 1]
    jgg, juu = eri_mo[0, 0, 0, 0], eri_mo[1, 1, 1, 1]
    jgu, kgu = eri_mo[0, 0, 1, 1], eri_mo[0, 1, 0, 1]
    # basis index = 2*Q1 + Q0
    diag = np.array([
        e_nuc,                                                     # |00>
        2 * huu + juu + e_nuc,                                     # |01>
        2 * hgg + jgg + e_nuc,                                     # |10>
        2 * hgg + 2 * huu + jgg + juu + 4 * jgu - 2 * kgu + e_nuc,  # |11>
    ])
    h_ii = diag.sum() / 4.0
    h_zi = (diag[0] + diag[1] - diag[2] - diag[3]) / 4.0
    h_iz = (diag[0] - diag[1] + diag[2] - diag[3]) / 4.0
    h_zz = (diag[0] - diag[1] - diag[2] + diag[3]) / 4.0
    h_xx = h_yy = kgu / 2.0
    mat = np.diag(diag).astype(float)
    mat[1, 2] = mat[2, 1] = kgu
    return (h_ii, h_zi, h_iz, h_xx, h_yy, h_zz), np.linalg.eigvalsh(mat)[0]


def main():
    out = sys.stdout
    out.write("R_angstrom,h_II,h_ZI,h_IZ,h_XX,h_YY,h_ZZ\n")
    for r in R_GRID:
        coeffs, e0 = qubit_coefficients(r)
        out.write(f"{r:.2f}," + ",".join(f"{x:.12f}" for x in coeffs) + "\n")
        sys.stderr.write(f"R={r:.2f}  E0={e0:.8f}\n")


if __name__ == "__main__":
    main()
