"""Determinant full CI for closed-shell active spaces (dense, desk scale).

The Hamiltonian is applied directly in second quantization to
determinant bitstrings (alpha spin orbitals on the low bits), which
keeps the fermionic sign bookkeeping in one obvious place.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np


def _annihilate(bits: int, idx: int):
    if not (bits >> idx) & 1:
        return None
    sign = -1 if bin(bits & ((1 << idx) - 1)).count("1") % 2 else 1
    return bits & ~(1 << idx), sign


def _create(bits: int, idx: int):
    if (bits >> idx) & 1:
        return None
    sign = -1 if bin(bits & ((1 << idx) - 1)).count("1") % 2 else 1
    return bits | (1 << idx), sign


def _apply_product(bits: int, ops):
    """ops: sequence of (index, is_creation) applied right to left."""
    sign = 1
    for idx, create in reversed(ops):
        res = _create(bits, idx) if create else _annihilate(bits, idx)
        if res is None:
            return None
        bits, s = res
        sign *= s
    return bits, sign


def fci_hamiltonian(h, g, n_electrons):
    """Dense FCI matrix in the S_z = 0 determinant basis."""
    n = h.shape[0]
    n_alpha = n_electrons // 2
    if n_electrons % 2:
        raise ValueError("closed-shell reference required")
    strings = [sum(1 << q for q in occ) for occ in combinations(range(n), n_alpha)]
    dets = [a | (b << n) for a in strings for b in strings]
    pos = {d: i for i, d in enumerate(dets)}
    dim = len(dets)
    ham = np.zeros((dim, dim))

    spins = (lambda p: p, lambda p: p + n)
    one_body = [
        ((s(p), True), (s(q), False), h[p, q])
        for p in range(n)
        for q in range(n)
        if h[p, q] != 0.0
        for s in spins
    ]
    two_body = []
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s_ in range(n):
                    coeff = g[p, q, r, s_]
                    if coeff == 0.0:
                        continue
                    for s1 in spins:
                        for s2 in spins:
                            two_body.append(
                                (
                                    (s1(p), True),
                                    (s2(r), True),
                                    (s2(s_), False),
                                    (s1(q), False),
                                    0.5 * coeff,
                                )
                            )

    for col, det in enumerate(dets):
        for *ops, coeff in one_body:
            res = _apply_product(det, ops)
            if res is not None:
                ham[pos[res[0]], col] += res[1] * coeff
        for *ops, coeff in two_body:
            res = _apply_product(det, ops)
            if res is not None:
                row = pos.get(res[0])
                if row is not None:
                    ham[row, col] += res[1] * coeff
    return ham


def fci_energies(h, g, n_electrons, e_nuclear=0.0, n_roots=1):
    ham = fci_hamiltonian(h, g, n_electrons)
    evals = np.linalg.eigvalsh(ham)
    return evals[:n_roots] + e_nuclear


def fci_ground_energy(h, g, n_electrons, e_nuclear=0.0) -> float:
    return float(fci_energies(h, g, n_electrons, e_nuclear, 1)[0])
