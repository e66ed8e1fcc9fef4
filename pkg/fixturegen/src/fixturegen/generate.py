"""Generate the committed FCIDUMP fixtures and reference-energy JSON.

Each entry produces `fixtures/<family>/<tag>.fcidump` plus
`<tag>.ref.json` carrying SCF/MP2/FCI reference energies computed in
the same active space.  Outputs are deterministic; re-running
reproduces the committed files.
"""

from __future__ import annotations

import argparse
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .ci import fci_ground_energy
from .scf import SCFResult, mo_integrals, molecule_integrals, mp2_correction, restricted_hartree_fock


@dataclass(frozen=True)
class FixtureSpec:
    family: str
    molecule: str
    tag: str
    atoms: tuple  # ((symbol, (x, y, z)), ...) in angstrom
    basis: str
    n_frozen: int = 0
    n_active: int | None = None  # spatial orbitals kept (None: all)
    note: str = ""


def _h2(r):
    return (("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, r)))


def _lih(r):
    return (("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, r)))


def _beh2(r):
    return (("Be", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, r)), ("H", (0.0, 0.0, -r)))


def _n2(r):
    return (("N", (0.0, 0.0, 0.0)), ("N", (0.0, 0.0, r)))


def _c2h6():
    """Staggered ethane, C-C 1.536 A, C-H 1.091 A, CCH angle 111.17 deg."""
    rcc, rch, ang = 1.536, 1.091, math.radians(111.17)
    hz = rch * math.cos(ang)  # negative: hydrogens point away from the other C
    rho = rch * math.sin(ang)
    atoms = [("C", (0.0, 0.0, 0.0)), ("C", (0.0, 0.0, rcc))]
    for k in range(3):
        phi = 2 * math.pi * k / 3
        atoms.append(("H", (rho * math.cos(phi), rho * math.sin(phi), hz)))
    for k in range(3):
        phi = 2 * math.pi * k / 3 + math.pi / 3
        atoms.append(("H", (rho * math.cos(phi), rho * math.sin(phi), rcc - hz)))
    return tuple(atoms)


def default_specs() -> list[FixtureSpec]:
    specs: list[FixtureSpec] = []
    for r in (0.7414, 1.5, 2.5):
        specs.append(FixtureSpec("h2_sto3g", "H2", f"{r:.4f}", _h2(r), "sto-3g"))
        specs.append(FixtureSpec("h2_631g", "H2", f"{r:.4f}", _h2(r), "6-31g"))
    for r in (1.2, 1.5949, 2.5):
        specs.append(
            FixtureSpec("lih_2_10", "LiH", f"{r:.4f}", _lih(r), "sto-3g", n_frozen=1)
        )
    for r in (1.3264, 1.5, 2.5, 5.0):
        specs.append(
            FixtureSpec(
                "beh2_4_8",
                "BeH2",
                f"{r:.4f}",
                _beh2(r),
                "sto-3g",
                n_frozen=1,
                n_active=4,
                note="active virtuals ranked by MP2 density diagonal",
            )
        )
    for r in (1.0977, 1.6, 2.2):
        specs.append(
            FixtureSpec("n2_full", "N2", f"{r:.4f}", _n2(r), "sto-3g")
        )
        specs.append(
            FixtureSpec("n2_6_12", "N2", f"{r:.4f}", _n2(r), "sto-3g", n_frozen=4)
        )
    specs.append(
        FixtureSpec(
            "c2h6_2_12",
            "C2H6",
            "1.5360",
            _c2h6(),
            "sto-3g",
            n_frozen=8,
            n_active=6,
            note="single highest occupied pair, five MP2-ranked virtuals",
        )
    )
    return specs


def _select_active(scf: SCFResult, h_mo, eri_mo, n_frozen, n_active):
    n = h_mo.shape[0]
    n_occ = scf.n_electrons // 2
    frozen = list(range(n_frozen))
    occ_active = list(range(n_frozen, n_occ))
    virt = list(range(n_occ, n))
    if n_active is None or n_active == len(occ_active) + len(virt):
        return frozen, occ_active + virt
    n_virt_keep = n_active - len(occ_active)
    if n_virt_keep < 0:
        raise ValueError("active space smaller than the occupied count")
    _, dvv = mp2_correction(scf, h_mo, eri_mo, frozen=frozen)
    ranked = sorted(virt, key=lambda a: (-dvv[a], a))
    keep = sorted(ranked[:n_virt_keep])
    return frozen, occ_active + keep


def _fold_core(h_mo, eri_mo, e_nuc, frozen, active):
    shift = 2.0 * sum(h_mo[i, i] for i in frozen)
    for i in frozen:
        for j in frozen:
            shift += 2.0 * eri_mo[i, i, j, j] - eri_mo[i, j, j, i]
    idx = np.asarray(active, dtype=int)
    h_eff = h_mo[np.ix_(idx, idx)].copy()
    for i in frozen:
        h_eff += 2.0 * eri_mo[np.ix_(idx, idx)][:, :, i, i] - eri_mo[:, i, i, :][np.ix_(idx, idx)]
    g_eff = eri_mo[np.ix_(idx, idx, idx, idx)].copy()
    return h_eff, g_eff, e_nuc + shift


def format_fcidump(h, g, e_core, n_electrons) -> str:
    n = h.shape[0]
    lines = [
        f"&FCI NORB={n},NELEC={n_electrons},MS2=0,",
        " ORBSYM=" + ",".join(["1"] * n) + ",",
        " ISYM=1,",
        "&END",
    ]

    def rec(val, i, j, k, l):
        lines.append(f" {val:.16E} {i:4d} {j:4d} {k:4d} {l:4d}")

    for p in range(n):
        for q in range(p + 1):
            pq = p * (p + 1) // 2 + q
            for r in range(p + 1):
                for s in range(r + 1):
                    if r * (r + 1) // 2 + s > pq:
                        continue
                    if g[p, q, r, s] != 0.0:
                        rec(g[p, q, r, s], p + 1, q + 1, r + 1, s + 1)
    for p in range(n):
        for q in range(p + 1):
            if h[p, q] != 0.0:
                rec(h[p, q], p + 1, q + 1, 0, 0)
    rec(e_core, 0, 0, 0, 0)
    return "\n".join(lines) + "\n"


def generate_fixture(spec: FixtureSpec, out_root: Path, max_fci_dim=6000) -> dict:
    s, h_ao, eri_ao, e_nuc, n_elec = molecule_integrals(spec.atoms, spec.basis)
    scf = restricted_hartree_fock(s, h_ao, eri_ao, e_nuc, n_elec)
    if not scf.converged:
        raise RuntimeError(f"SCF failed to converge for {spec.molecule} {spec.tag}")
    h_mo, eri_mo = mo_integrals(scf)
    frozen, active = _select_active(scf, h_mo, eri_mo, spec.n_frozen, spec.n_active)
    h_eff, g_eff, e_core = _fold_core(h_mo, eri_mo, e_nuc, frozen, active)
    n_active_elec = n_elec - 2 * len(frozen)
    e_mp2_corr, _ = mp2_correction(scf, h_mo, eri_mo, frozen=frozen)

    from math import comb

    dim = comb(len(active), n_active_elec // 2) ** 2
    e_fci = None
    if dim <= max_fci_dim:
        e_fci = fci_ground_energy(h_eff, g_eff, n_active_elec, e_core)

    family_dir = out_root / spec.family
    family_dir.mkdir(parents=True, exist_ok=True)
    dump_path = family_dir / f"{spec.tag}.fcidump"
    dump_path.write_text(format_fcidump(h_eff, g_eff, e_core, n_active_elec))

    ref = {
        "molecule": spec.molecule,
        "tag": spec.tag,
        "basis": spec.basis,
        "geometry_angstrom": [[sym, *xyz] for sym, xyz in spec.atoms],
        "n_electrons_active": n_active_elec,
        "n_orbitals_active": len(active),
        "frozen_core": frozen,
        "active_orbitals": active,
        "e_nuclear_full": e_nuc,
        "e_scf": scf.e_total,
        "e_mp2": scf.e_total + e_mp2_corr,
        "e_fci_active": e_fci,
        "note": spec.note,
        "generator": {"name": "fixturegen", "version": __version__},
    }
    if spec.molecule == "H2":
        ref["integrals"] = {
            "h_00": float(h_eff[0, 0]),
            "h_11": float(h_eff[1, 1]),
            "g_0000": float(g_eff[0, 0, 0, 0]),
            "g_1111": float(g_eff[1, 1, 1, 1]),
            "g_0011": float(g_eff[0, 0, 1, 1]),
            "g_0101": float(g_eff[0, 1, 0, 1]),
        }
    (family_dir / f"{spec.tag}.ref.json").write_text(json.dumps(ref, indent=1) + "\n")
    return ref


def write_manifest(out_root: Path, specs, refs) -> None:
    entries = []
    for spec, ref in zip(specs, refs):
        entries.append(
            {
                "family": spec.family,
                "molecule": spec.molecule,
                "tag": spec.tag,
                "basis": spec.basis,
                "fcidump": f"{spec.family}/{spec.tag}.fcidump",
                "ref": f"{spec.family}/{spec.tag}.ref.json",
                "n_electrons_active": ref["n_electrons_active"],
                "n_qubits": 2 * ref["n_orbitals_active"],
                "e_fci_active": ref["e_fci_active"],
            }
        )
    (out_root / "manifest.json").write_text(json.dumps(entries, indent=1) + "\n")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="regenerate FCIDUMP fixtures")
    parser.add_argument("--out", default="fixtures", help="output directory")
    parser.add_argument("--family", default=None, help="only regenerate one family")
    args = parser.parse_args(argv)
    out_root = Path(args.out)
    specs = default_specs()
    if args.family:
        specs = [s for s in specs if s.family == args.family]
        if not specs:
            raise SystemExit(f"unknown family {args.family!r}")
    refs = []
    for spec in specs:
        print(f"generating {spec.family}/{spec.tag} ...", flush=True)
        refs.append(generate_fixture(spec, out_root))
    if not args.family:
        write_manifest(out_root, specs, refs)
    print(f"wrote {len(specs)} fixtures under {out_root}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
