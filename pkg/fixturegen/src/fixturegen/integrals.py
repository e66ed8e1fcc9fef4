"""One- and two-electron integrals over contracted Cartesian Gaussians
via the McMurchie-Davidson scheme (s and p shells suffice here)."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import gamma, gammainc

from .basis import ContractedGaussian


def boys(m_max: int, t: float) -> np.ndarray:
    """Boys functions F_0..F_m(t)."""
    out = np.empty(m_max + 1)
    if t < 1e-13:
        for m in range(m_max + 1):
            out[m] = 1.0 / (2 * m + 1)
        return out
    # downward recursion from an accurate top value
    top = m_max
    out[top] = gammainc(top + 0.5, t) * gamma(top + 0.5) / (2.0 * t ** (top + 0.5))
    et = np.exp(-t)
    for m in range(top - 1, -1, -1):
        out[m] = (2.0 * t * out[m + 1] + et) / (2 * m + 1)
    return out


def hermite_coefficients(l1: int, l2: int, a: float, b: float, ab: float) -> np.ndarray:
    """E_t^{ij} for one Cartesian direction, t = 0..l1+l2 (ab = A - B)."""
    p = a + b
    mu = a * b / p
    e = np.zeros((l1 + 1, l2 + 1, l1 + l2 + 2))
    e[0, 0, 0] = np.exp(-mu * ab * ab)
    pa = -b * ab / p  # P - A
    pb = a * ab / p  # P - B
    for i in range(1, l1 + 1):
        for t in range(i + 1):
            e[i, 0, t] = (
                (e[i - 1, 0, t - 1] / (2 * p) if t > 0 else 0.0)
                + pa * e[i - 1, 0, t]
                + (t + 1) * e[i - 1, 0, t + 1]
            )
    for i in range(l1 + 1):
        for j in range(1, l2 + 1):
            for t in range(i + j + 1):
                e[i, j, t] = (
                    (e[i, j - 1, t - 1] / (2 * p) if t > 0 else 0.0)
                    + pb * e[i, j - 1, t]
                    + (t + 1) * e[i, j - 1, t + 1]
                )
    return e


def _overlap_1d(l1, l2, a, b, ab):
    e = hermite_coefficients(l1, l2, a, b, ab)
    p = a + b
    return e[l1, l2, 0] * np.sqrt(np.pi / p)


def _primitive_overlap(a, apow, acenter, b, bpow, bcenter):
    s = 1.0
    for d in range(3):
        s *= _overlap_1d(apow[d], bpow[d], a, b, acenter[d] - bcenter[d])
    return s


def _primitive_kinetic(a, apow, acenter, b, bpow, bcenter):
    def s1(d, l2_shift):
        l2 = bpow[d] + l2_shift
        if l2 < 0:
            return 0.0
        return _overlap_1d(apow[d], l2, a, b, acenter[d] - bcenter[d])

    total = 0.0
    for d in range(3):
        j = bpow[d]
        td = -2.0 * b * b * s1(d, +2) + b * (2 * j + 1) * s1(d, 0) - 0.5 * j * (j - 1) * s1(d, -2)
        rest = 1.0
        for o in range(3):
            if o != d:
                rest *= _overlap_1d(apow[o], bpow[o], a, b, acenter[o] - bcenter[o])
        total += td * rest
    return total


def hermite_coulomb(t_max, u_max, v_max, p, pc) -> np.ndarray:
    """R_{tuv} tensor contracted with Boys functions."""
    tt = p * (pc[0] ** 2 + pc[1] ** 2 + pc[2] ** 2)
    n_max = t_max + u_max + v_max
    f = boys(n_max, tt)
    r = np.zeros((n_max + 1, t_max + 1, u_max + 1, v_max + 1))
    for n in range(n_max + 1):
        r[n, 0, 0, 0] = (-2.0 * p) ** n * f[n]
    for n in range(n_max - 1, -1, -1):
        for t in range(t_max + 1):
            for u in range(u_max + 1):
                for v in range(v_max + 1):
                    if t == u == v == 0:
                        continue
                    if t + u + v > n_max - n:
                        continue
                    if t > 0:
                        val = pc[0] * r[n + 1, t - 1, u, v]
                        if t > 1:
                            val += (t - 1) * r[n + 1, t - 2, u, v]
                        r[n, t, u, v] = val
                    elif u > 0:
                        val = pc[1] * r[n + 1, t, u - 1, v]
                        if u > 1:
                            val += (u - 1) * r[n + 1, t, u - 2, v]
                        r[n, t, u, v] = val
                    else:
                        val = pc[2] * r[n + 1, t, u, v - 1]
                        if v > 1:
                            val += (v - 1) * r[n + 1, t, u, v - 2]
                        r[n, t, u, v] = val
    return r[0]


def _primitive_nuclear(a, apow, acenter, b, bpow, bcenter, nucleus):
    p = a + b
    pcenter = [(a * acenter[d] + b * bcenter[d]) / p for d in range(3)]
    e = [
        hermite_coefficients(apow[d], bpow[d], a, b, acenter[d] - bcenter[d])
        for d in range(3)
    ]
    lmax = [apow[d] + bpow[d] for d in range(3)]
    pc = [pcenter[d] - nucleus[d] for d in range(3)]
    r = hermite_coulomb(lmax[0], lmax[1], lmax[2], p, pc)
    total = 0.0
    for t in range(lmax[0] + 1):
        for u in range(lmax[1] + 1):
            for v in range(lmax[2] + 1):
                total += (
                    e[0][apow[0], bpow[0], t]
                    * e[1][apow[1], bpow[1], u]
                    * e[2][apow[2], bpow[2], v]
                    * r[t, u, v]
                )
    return 2.0 * np.pi / p * total


def _primitive_eri(a, apow, ac, b, bpow, bc, c, cpow, cc, d, dpow, dc):
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    pcen = [(a * ac[i] + b * bc[i]) / p for i in range(3)]
    qcen = [(c * cc[i] + d * dc[i]) / q for i in range(3)]
    e1 = [hermite_coefficients(apow[i], bpow[i], a, b, ac[i] - bc[i]) for i in range(3)]
    e2 = [hermite_coefficients(cpow[i], dpow[i], c, d, cc[i] - dc[i]) for i in range(3)]
    l1 = [apow[i] + bpow[i] for i in range(3)]
    l2 = [cpow[i] + dpow[i] for i in range(3)]
    pq = [pcen[i] - qcen[i] for i in range(3)]
    r = hermite_coulomb(l1[0] + l2[0], l1[1] + l2[1], l1[2] + l2[2], alpha, pq)
    total = 0.0
    for t in range(l1[0] + 1):
        for u in range(l1[1] + 1):
            for v in range(l1[2] + 1):
                w1 = (
                    e1[0][apow[0], bpow[0], t]
                    * e1[1][apow[1], bpow[1], u]
                    * e1[2][apow[2], bpow[2], v]
                )
                if w1 == 0.0:
                    continue
                for tau in range(l2[0] + 1):
                    for nu in range(l2[1] + 1):
                        for phi in range(l2[2] + 1):
                            w2 = (
                                e2[0][cpow[0], dpow[0], tau]
                                * e2[1][cpow[1], dpow[1], nu]
                                * e2[2][cpow[2], dpow[2], phi]
                            )
                            if w2 == 0.0:
                                continue
                            sign = (-1.0) ** (tau + nu + phi)
                            total += w1 * w2 * sign * r[t + tau, u + nu, v + phi]
    return total * 2.0 * np.pi**2.5 / (p * q * np.sqrt(p + q))


def _contracted_pairs(f1: ContractedGaussian, f2: ContractedGaussian):
    for a, ca in zip(f1.exponents, f1.coefficients):
        for b, cb in zip(f2.exponents, f2.coefficients):
            yield a, ca, b, cb


def overlap_matrix(basis) -> np.ndarray:
    n = len(basis)
    s = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            fi, fj = basis[i], basis[j]
            val = sum(
                ca * cb * _primitive_overlap(a, fi.powers, fi.center, b, fj.powers, fj.center)
                for a, ca, b, cb in _contracted_pairs(fi, fj)
            )
            s[i, j] = s[j, i] = val
    return s


def kinetic_matrix(basis) -> np.ndarray:
    n = len(basis)
    t = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            fi, fj = basis[i], basis[j]
            val = sum(
                ca * cb * _primitive_kinetic(a, fi.powers, fi.center, b, fj.powers, fj.center)
                for a, ca, b, cb in _contracted_pairs(fi, fj)
            )
            t[i, j] = t[j, i] = val
    return t


def nuclear_matrix(basis, nuclei) -> np.ndarray:
    """nuclei: list of (charge, (x, y, z)) in bohr."""
    n = len(basis)
    v = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            fi, fj = basis[i], basis[j]
            val = 0.0
            for a, ca, b, cb in _contracted_pairs(fi, fj):
                for charge, center in nuclei:
                    val -= charge * ca * cb * _primitive_nuclear(
                        a, fi.powers, fi.center, b, fj.powers, fj.center, center
                    )
            v[i, j] = v[j, i] = val
    return v


def eri_tensor(basis) -> np.ndarray:
    """Chemist-notation (ij|kl) with full 8-fold symmetry."""
    n = len(basis)
    eri = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(i + 1):
                for l in range(k + 1):
                    kl = k * (k + 1) // 2 + l
                    if kl > ij:
                        continue
                    fi, fj, fk, fl = basis[i], basis[j], basis[k], basis[l]
                    val = 0.0
                    for a, ca in zip(fi.exponents, fi.coefficients):
                        for b, cb in zip(fj.exponents, fj.coefficients):
                            for c, cc in zip(fk.exponents, fk.coefficients):
                                for d, cd in zip(fl.exponents, fl.coefficients):
                                    val += ca * cb * cc * cd * _primitive_eri(
                                        a, fi.powers, fi.center,
                                        b, fj.powers, fj.center,
                                        c, fk.powers, fk.center,
                                        d, fl.powers, fl.center,
                                    )
                    for a_, b_, c_, d_ in (
                        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
                    ):
                        eri[a_, b_, c_, d_] = val
    return eri


def nuclear_repulsion(nuclei) -> float:
    e = 0.0
    for i in range(len(nuclei)):
        zi, ri = nuclei[i]
        for j in range(i):
            zj, rj = nuclei[j]
            e += zi * zj / np.linalg.norm(np.subtract(ri, rj))
    return float(e)
