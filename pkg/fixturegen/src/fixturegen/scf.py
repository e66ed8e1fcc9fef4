"""Restricted Hartree-Fock with DIIS, MO transformation and MP2."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .basis import ATOMIC_NUMBER, build_basis
from .integrals import (
    eri_tensor,
    kinetic_matrix,
    nuclear_matrix,
    nuclear_repulsion,
    overlap_matrix,
)

BOHR_PER_ANGSTROM = 1.0 / 0.529177210903


@dataclass
class SCFResult:
    e_total: float
    e_nuclear: float
    mo_energies: np.ndarray
    mo_coefficients: np.ndarray  # AO x MO
    h_core_ao: np.ndarray
    eri_ao: np.ndarray
    n_electrons: int
    converged: bool


def molecule_integrals(atoms_angstrom, basis_name):
    """atoms: list of (symbol, (x, y, z)) in angstrom."""
    atoms_bohr = [
        (sym, tuple(c * BOHR_PER_ANGSTROM for c in xyz)) for sym, xyz in atoms_angstrom
    ]
    basis = build_basis(atoms_bohr, basis_name)
    nuclei = [(float(ATOMIC_NUMBER[sym]), xyz) for sym, xyz in atoms_bohr]
    s = overlap_matrix(basis)
    h = kinetic_matrix(basis) + nuclear_matrix(basis, nuclei)
    eri = eri_tensor(basis)
    e_nuc = nuclear_repulsion(nuclei)
    n_electrons = sum(ATOMIC_NUMBER[sym] for sym, _ in atoms_angstrom)
    return s, h, eri, e_nuc, n_electrons


def restricted_hartree_fock(
    s, h, eri, e_nuc, n_electrons, max_iter=200, e_tol=1e-11, d_tol=1e-9
) -> SCFResult:
    n_occ = n_electrons // 2
    if n_electrons % 2:
        raise ValueError("closed shells only")
    # symmetric orthogonalization
    evals, evecs = eigh(s)
    x = evecs @ np.diag(evals**-0.5) @ evecs.T

    def fock(dm):
        j = np.einsum("pqrs,rs->pq", eri, dm, optimize=True)
        k = np.einsum("prqs,rs->pq", eri, dm, optimize=True)
        return h + 2.0 * j - k

    def density(f):
        fp = x.T @ f @ x
        e_mo, c_p = eigh(fp)
        c = x @ c_p
        occ = c[:, :n_occ]
        return occ @ occ.T, c, e_mo

    # generalized Wolfsberg-Helmholz guess; the bare core Hamiltonian
    # converges to an excited SCF solution for N2
    gwh = 0.875 * s * (np.diag(h)[:, None] + np.diag(h)[None, :])
    np.fill_diagonal(gwh, np.diag(h))
    dm, c, e_mo = density(gwh)
    e_old = 0.0
    diis_f, diis_e = [], []
    converged = False
    for _ in range(max_iter):
        f = fock(dm)
        err = f @ dm @ s - s @ dm @ f
        diis_f.append(f)
        diis_e.append(err)
        if len(diis_f) > 8:
            diis_f.pop(0)
            diis_e.pop(0)
        if len(diis_f) > 1:
            m = len(diis_f)
            b = -np.ones((m + 1, m + 1))
            b[m, m] = 0.0
            for i in range(m):
                for j in range(m):
                    b[i, j] = np.sum(diis_e[i] * diis_e[j])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                w = np.linalg.solve(b, rhs)[:m]
                f = sum(wi * fi for wi, fi in zip(w, diis_f))
            except np.linalg.LinAlgError:
                pass
        dm, c, e_mo = density(f)
        e_elec = float(np.sum(dm * (h + fock(dm))))
        if abs(e_elec - e_old) < e_tol and np.abs(err).max() < d_tol:
            converged = True
            e_old = e_elec
            break
        e_old = e_elec
    return SCFResult(
        e_total=e_old + e_nuc,
        e_nuclear=e_nuc,
        mo_energies=e_mo,
        mo_coefficients=c,
        h_core_ao=h,
        eri_ao=eri,
        n_electrons=n_electrons,
        converged=converged,
    )


def mo_integrals(scf: SCFResult):
    c = scf.mo_coefficients
    h_mo = c.T @ scf.h_core_ao @ c
    eri_mo = np.einsum(
        "ap,bq,cr,ds,abcd->pqrs", c, c, c, c, scf.eri_ao, optimize=True
    )
    return h_mo, eri_mo


def mp2_correction(scf: SCFResult, h_mo, eri_mo, frozen=()):
    """MP2 energy and the diagonal of the virtual-virtual relaxed-density
    block, used to rank virtuals for active-space selection."""
    n = h_mo.shape[0]
    n_occ = scf.n_electrons // 2
    occ = [i for i in range(n_occ) if i not in frozen]
    virt = list(range(n_occ, n))
    eps = scf.mo_energies
    e2 = 0.0
    dvv = np.zeros(n)
    for i in occ:
        for j in occ:
            for a in virt:
                for b in virt:
                    iajb = eri_mo[i, a, j, b]
                    ibja = eri_mo[i, b, j, a]
                    denom = eps[i] + eps[j] - eps[a] - eps[b]
                    t = iajb * (2.0 * iajb - ibja) / denom
                    e2 += t
                    dvv[a] += iajb * (2.0 * iajb - ibja) / denom**2
    return float(e2), dvv
