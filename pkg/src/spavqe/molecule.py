"""Molecular systems: FCIDUMP ingestion, qubit Hamiltonians, active
spaces, pair-orbital assignment and orbital rotations.

Integrals are stored in chemist notation, (pq|rs) with 8-fold
permutational symmetry, all values in hartree.  Only closed-shell
systems (even electron count, MS2 = 0) are supported.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import expm

from .paulis import (
    FermionOperator,
    PauliString,
    PauliSum,
    SpinLayout,
    jordan_wigner,
)

SYMMETRY_TOL = 1e-10


class MoleculeError(ValueError):
    pass


def default_pair_sets(
    h_diagonal: np.ndarray, n_electrons: int, n_orbitals: int
) -> tuple[tuple[int, ...], ...]:
    """Assign orbitals to electron pairs from a one-body energy proxy.

    The k-th lowest diagonal element becomes the reference orbital of
    pair k; remaining orbitals are dealt round-robin in ascending order
    of the proxy.  Any assignment is valid input; this default merely
    gives the optimizers a reasonable starting structure.
    """
    n_pairs = n_electrons // 2
    if n_pairs == 0:
        return ()
    if n_pairs > n_orbitals:
        raise MoleculeError("more electron pairs than orbitals")
    order = sorted(range(n_orbitals), key=lambda p: (float(h_diagonal[p]), p))
    sets = [[order[k]] for k in range(n_pairs)]
    for i, p in enumerate(order[n_pairs:]):
        sets[i % n_pairs].append(p)
    return tuple(tuple(s) for s in sets)


@dataclass(frozen=True)
class MolecularSystem:
    n_electrons: int
    e_nuclear: float
    h: np.ndarray
    g: np.ndarray
    pair_sets: tuple[tuple[int, ...], ...] = ()
    orbsym: tuple[int, ...] | None = None

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        g = np.asarray(self.g, dtype=float)
        n = h.shape[0]
        if h.shape != (n, n) or g.shape != (n, n, n, n):
            raise MoleculeError("integral arrays have inconsistent shapes")
        if self.n_electrons <= 0 or self.n_electrons % 2:
            raise MoleculeError("only closed shells: electron count must be even and positive")
        if np.abs(h - h.T).max() > SYMMETRY_TOL:
            raise MoleculeError("one-electron integrals are not symmetric")
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if np.abs(g - g.transpose(perm)).max() > SYMMETRY_TOL:
                raise MoleculeError("two-electron integrals lack 8-fold symmetry")
        h.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g", g)
        pair_sets = tuple(tuple(int(p) for p in s) for s in self.pair_sets)
        if not pair_sets:
            pair_sets = default_pair_sets(np.diag(h), self.n_electrons, n)
        seen: set[int] = set()
        for s in pair_sets:
            if not s:
                raise MoleculeError("empty pair orbital set")
            for p in s:
                if not 0 <= p < n:
                    raise MoleculeError(f"pair orbital {p} out of range")
                if p in seen:
                    raise MoleculeError(f"orbital {p} assigned to two pairs")
                seen.add(p)
        if len(pair_sets) != self.n_electrons // 2:
            raise MoleculeError(
                f"{len(pair_sets)} pair sets for {self.n_electrons // 2} electron pairs"
            )
        object.__setattr__(self, "pair_sets", pair_sets)

    @property
    def n_orbitals(self) -> int:
        return self.h.shape[0]

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_orbitals

    @property
    def layout(self) -> SpinLayout:
        return SpinLayout(self.n_orbitals)

    def with_pair_sets(self, pair_sets) -> "MolecularSystem":
        return replace(self, pair_sets=tuple(tuple(s) for s in pair_sets))


@dataclass(frozen=True)
class OrbitalRotation:
    kappa: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.kappa, dtype=float)
        if k.ndim != 2 or k.shape[0] != k.shape[1]:
            raise MoleculeError("rotation generator must be square")
        if np.abs(k + k.T).max() > 1e-12:
            raise MoleculeError("rotation generator must be antisymmetric")
        k.setflags(write=False)
        object.__setattr__(self, "kappa", k)

    @classmethod
    def from_lower_triangle(cls, values, n_orbitals: int) -> "OrbitalRotation":
        k = np.zeros((n_orbitals, n_orbitals))
        idx = np.tril_indices(n_orbitals, -1)
        k[idx] = values
        return cls(k - k.T)

    def coefficients(self) -> np.ndarray:
        return expm(self.kappa)


def synthetic_system(
    n_electrons: int, n_orbitals: int, pair_sizes=None
) -> MolecularSystem:
    """Zero-interaction system with an ascending one-body diagonal; used
    for structural (resource-count) studies where only the electron and
    orbital bookkeeping matters."""
    h = np.diag(np.arange(n_orbitals, dtype=float))
    g = np.zeros((n_orbitals,) * 4)
    sys = MolecularSystem(n_electrons, 0.0, h, g)
    if pair_sizes is not None:
        n_pairs = n_electrons // 2
        if len(pair_sizes) != n_pairs or sum(pair_sizes) > n_orbitals:
            raise MoleculeError("invalid pair size partition")
        sets = [[k] for k in range(n_pairs)]
        nxt = n_pairs
        for k, size in enumerate(pair_sizes):
            for _ in range(size - 1):
                sets[k].append(nxt)
                nxt += 1
        sys = sys.with_pair_sets(sets)
    return sys


# ---------------------------------------------------------------------------
# FCIDUMP reader / writer (Molpro convention, 1-based indices)

_HEADER_KV = re.compile(r"([A-Za-z0-9_]+)\s*=\s*([^=]*?)(?=(?:,?\s*[A-Za-z0-9_]+\s*=)|$)")


def parse_fcidump(source) -> MolecularSystem:
    """Read an FCIDUMP: namelist header, then `value i j k l` records.

    `value 0 0 0 0` is the nuclear repulsion (plus any frozen-core
    shift), `value i j 0 0` one-electron integrals and four nonzero
    indices the chemist-notation (ij|kl); 8-fold completion is applied.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = str(source)
    upper = text.upper()
    start = upper.find("&FCI")
    if start < 0:
        raise MoleculeError("missing &FCI namelist header")
    end_match = re.search(r"&END|/", upper[start:])
    if not end_match:
        raise MoleculeError("unterminated FCIDUMP header")
    header = text[start + 4 : start + end_match.start()]
    body = text[start + end_match.end() :]

    fields: dict[str, str] = {}
    for key, value in _HEADER_KV.findall(header.replace("\n", " ")):
        fields[key.upper()] = value.strip().rstrip(",")
    try:
        n_orb = int(fields["NORB"])
        n_elec = int(fields["NELEC"])
    except KeyError as missing:
        raise MoleculeError(f"FCIDUMP header lacks {missing}") from None
    ms2 = int(fields.get("MS2", "0") or 0)
    if n_elec <= 0 or n_elec % 2:
        raise MoleculeError("only closed-shell systems: NELEC must be even")
    if ms2 != 0:
        raise MoleculeError("only closed-shell systems: MS2 must be 0")
    orbsym = None
    if "ORBSYM" in fields:
        nums = re.findall(r"\d+", fields["ORBSYM"])
        orbsym = tuple(int(x) for x in nums) if nums else None

    h = np.zeros((n_orb, n_orb))
    g = np.zeros((n_orb,) * 4)
    e_nuc = 0.0
    for line in body.splitlines():
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise MoleculeError(f"malformed integral record: {line!r}")
        val = float(parts[0])
        i, j, k, l = (int(x) for x in parts[1:])
        for idx in (i, j, k, l):
            if idx < 0 or idx > n_orb:
                raise MoleculeError(f"orbital index {idx} exceeds NORB={n_orb}")
        if i == j == k == l == 0:
            e_nuc = val
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise MoleculeError(f"malformed one-electron record: {line!r}")
            h[i - 1, j - 1] = val
            h[j - 1, i - 1] = val
        else:
            if 0 in (i, j, k, l):
                raise MoleculeError(f"malformed two-electron record: {line!r}")
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            for a, b, c, d in (
                (p, q, r, s),
                (q, p, r, s),
                (p, q, s, r),
                (q, p, s, r),
                (r, s, p, q),
                (s, r, p, q),
                (r, s, q, p),
                (s, r, q, p),
            ):
                g[a, b, c, d] = val
    return MolecularSystem(n_elec, e_nuc, h, g, orbsym=orbsym)


def write_fcidump(sys: MolecularSystem, stream=None) -> str:
    out = io.StringIO()
    orbsym = sys.orbsym or (1,) * sys.n_orbitals
    out.write(f"&FCI NORB={sys.n_orbitals},NELEC={sys.n_electrons},MS2=0,\n")
    out.write(" ORBSYM=" + ",".join(str(x) for x in orbsym) + ",\n")
    out.write(" ISYM=1,\n")
    out.write("&END\n")

    def rec(val, i, j, k, l):
        out.write(f" {val:.16E} {i:4d} {j:4d} {k:4d} {l:4d}\n")

    n = sys.n_orbitals
    for p in range(n):
        for q in range(p + 1):
            pq = p * (p + 1) // 2 + q
            for r in range(p + 1):
                for s in range(r + 1):
                    rs = r * (r + 1) // 2 + s
                    if rs > pq:
                        continue
                    val = sys.g[p, q, r, s]
                    if val != 0.0:
                        rec(val, p + 1, q + 1, r + 1, s + 1)
    for p in range(n):
        for q in range(p + 1):
            if sys.h[p, q] != 0.0:
                rec(sys.h[p, q], p + 1, q + 1, 0, 0)
    rec(sys.e_nuclear, 0, 0, 0, 0)
    text = out.getvalue()
    if stream is not None:
        stream.write(text)
    return text


# ---------------------------------------------------------------------------
# Hamiltonians


def build_qubit_hamiltonian(sys: MolecularSystem, layout: SpinLayout | None = None) -> PauliSum:
    """Second-quantized Hamiltonian in the Jordan-Wigner encoding.

    H = E_nuc + sum_pq h_pq a^_ps a_qs
             + 1/2 sum_pqrs (pq|rs) a^_ps a^_rt a_st a_qs
    over the active spin orbitals (s, t spin labels).
    """
    layout = layout or sys.layout
    n_spin = 2 * sys.n_orbitals
    spins = (layout.up, layout.down)
    terms = [PauliString({}, complex(sys.e_nuclear))]
    n = sys.n_orbitals

    creation = FermionOperator.creation
    annihilation = FermionOperator.annihilation

    for p in range(n):
        for q in range(n):
            if sys.h[p, q] == 0.0:
                continue
            for spin in spins:
                op = creation(spin(p)) * annihilation(spin(q))
                terms.extend((jordan_wigner(op, n_spin) * sys.h[p, q]).terms)
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    coeff = sys.g[p, q, r, s]
                    if coeff == 0.0:
                        continue
                    for s1 in spins:
                        for s2 in spins:
                            op = (
                                creation(s1(p))
                                * creation(s2(r))
                                * annihilation(s2(s))
                                * annihilation(s1(q))
                            )
                            terms.extend((jordan_wigner(op, n_spin) * (0.5 * coeff)).terms)
    return PauliSum(terms)


def build_hcb_hamiltonian(sys: MolecularSystem) -> PauliSum:
    """Seniority-zero Hamiltonian on one qubit per spatial orbital.

    Matrix elements over doubly-occupied configurations match the full
    Hamiltonian: pair occupation energies 2h_pp + (pp|pp), pair-pair
    Coulomb/exchange 4(pp|qq) - 2(pq|qp), and pair hopping (pq|pq).
    The construction is validated against a brute-force projection of
    the Jordan-Wigner Hamiltonian in the test suite.
    """
    n = sys.n_orbitals
    terms = [PauliString({}, complex(sys.e_nuclear))]

    def number(p, coeff):
        terms.append(PauliString({}, 0.5 * coeff))
        terms.append(PauliString({p: "Z"}, -0.5 * coeff))

    def number_pair(p, q, coeff):
        # N_p N_q = (1 - Z_p - Z_q + Z_p Z_q) / 4
        terms.append(PauliString({}, 0.25 * coeff))
        terms.append(PauliString({p: "Z"}, -0.25 * coeff))
        terms.append(PauliString({q: "Z"}, -0.25 * coeff))
        terms.append(PauliString({p: "Z", q: "Z"}, 0.25 * coeff))

    for p in range(n):
        number(p, 2.0 * sys.h[p, p] + sys.g[p, p, p, p])
    for p in range(n):
        for q in range(p + 1, n):
            number_pair(p, q, 4.0 * sys.g[p, p, q, q] - 2.0 * sys.g[p, q, q, p])
            hop = sys.g[p, q, p, q]
            if hop != 0.0:
                terms.append(PauliString({p: "X", q: "X"}, 0.5 * hop))
                terms.append(PauliString({p: "Y", q: "Y"}, 0.5 * hop))
    return PauliSum(terms)


def hf_energy(sys: MolecularSystem) -> float:
    """Closed-shell determinant energy from the integrals directly."""
    occ = range(sys.n_electrons // 2)
    e = sys.e_nuclear + 2.0 * sum(sys.h[i, i] for i in occ)
    for i in occ:
        for j in occ:
            e += 2.0 * sys.g[i, i, j, j] - sys.g[i, j, j, i]
    return float(e)


# ---------------------------------------------------------------------------
# active space and orbital rotation


def apply_active_space(
    sys: MolecularSystem, active, frozen
) -> MolecularSystem:
    """Fold frozen (doubly occupied) orbitals into an effective one-body
    potential and constant shift; restrict integrals to the active list."""
    active = [int(p) for p in active]
    frozen = [int(p) for p in frozen]
    if set(active) & set(frozen):
        raise MoleculeError("active and frozen orbital lists overlap")
    for p in (*active, *frozen):
        if not 0 <= p < sys.n_orbitals:
            raise MoleculeError(f"orbital {p} out of range")
    for s in sys.pair_sets:
        for p in s[1:]:
            if p in frozen:
                raise MoleculeError(
                    f"orbital {p} is frozen but correlates pair {s}: not a reference slot"
                )
    n_elec = sys.n_electrons - 2 * len(frozen)
    if n_elec <= 0:
        raise MoleculeError("freezing removes all electrons")
    if n_elec // 2 > len(active):
        raise MoleculeError("active space too small for remaining electron pairs")

    h, g = sys.h, sys.g
    shift = 2.0 * sum(h[i, i] for i in frozen)
    for i in frozen:
        for j in frozen:
            shift += 2.0 * g[i, i, j, j] - g[i, j, j, i]
    idx = np.asarray(active, dtype=int)
    h_eff = h[np.ix_(idx, idx)].copy()
    for i in frozen:
        h_eff += 2.0 * g[np.ix_(idx, idx)][:, :, i, i] - g[:, i, i, :][np.ix_(idx, idx)]
    g_eff = g[np.ix_(idx, idx, idx, idx)].copy()
    return MolecularSystem(n_elec, sys.e_nuclear + shift, h_eff, g_eff)


def rotate_orbitals(sys: MolecularSystem, rot: OrbitalRotation) -> MolecularSystem:
    """Exact orthogonal rotation of the integrals by C = exp(kappa)."""
    if rot.kappa.shape[0] != sys.n_orbitals:
        raise MoleculeError("rotation generator size does not match the system")
    c = rot.coefficients()
    h2 = c.T @ sys.h @ c
    g2 = np.einsum("ap,bq,cr,ds,abcd->pqrs", c, c, c, c, sys.g, optimize=True)
    return MolecularSystem(
        sys.n_electrons, sys.e_nuclear, h2, g2, pair_sets=sys.pair_sets, orbsym=sys.orbsym
    )
