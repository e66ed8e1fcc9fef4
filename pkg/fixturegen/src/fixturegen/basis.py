"""Gaussian basis sets (STO-3G for H/Li/Be/C/N, 6-31G for H) and shell
expansion into normalized primitive Cartesian Gaussians."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# STO-3G universal contraction coefficients
_C_1S = (0.1543289673, 0.5353281423, 0.4446345422)
_C_2S = (-0.09996722919, 0.3995128261, 0.7001154689)
_C_2P = (0.1559162750, 0.6076837186, 0.3919573931)

# element -> list of (shell_type, exponents, coefficients)
STO3G = {
    "H": [("s", (3.425250914, 0.6239137298, 0.1688554040), _C_1S)],
    "Li": [
        ("s", (16.11957475, 2.936200663, 0.7946504870), _C_1S),
        ("s", (0.6362897469, 0.1478600533, 0.04808867840), _C_2S),
        ("p", (0.6362897469, 0.1478600533, 0.04808867840), _C_2P),
    ],
    "Be": [
        ("s", (30.16787069, 5.495115306, 1.487192653), _C_1S),
        ("s", (1.314833110, 0.3055389383, 0.09937074560), _C_2S),
        ("p", (1.314833110, 0.3055389383, 0.09937074560), _C_2P),
    ],
    "C": [
        ("s", (71.61683735, 13.04509632, 3.530512160), _C_1S),
        ("s", (2.941249355, 0.6834830964, 0.2222899159), _C_2S),
        ("p", (2.941249355, 0.6834830964, 0.2222899159), _C_2P),
    ],
    "N": [
        ("s", (99.10616896, 18.05231239, 4.885660238), _C_1S),
        ("s", (3.780455879, 0.8784966449, 0.2857143744), _C_2S),
        ("p", (3.780455879, 0.8784966449, 0.2857143744), _C_2P),
    ],
}

G631 = {
    "H": [
        ("s", (18.73113696, 2.825394365, 0.6401216923), (0.03349460434, 0.2347269535, 0.8137573261)),
        ("s", (0.1612777588,), (1.0,)),
    ],
}

BASIS_SETS = {"sto-3g": STO3G, "6-31g": G631}

ATOMIC_NUMBER = {"H": 1, "Li": 3, "Be": 4, "C": 6, "N": 7}

_CART = {"s": [(0, 0, 0)], "p": [(1, 0, 0), (0, 1, 0), (0, 0, 1)]}


@dataclass(frozen=True)
class ContractedGaussian:
    center: tuple[float, float, float]
    powers: tuple[int, int, int]
    exponents: tuple[float, ...]
    coefficients: tuple[float, ...]  # normalized contraction


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def primitive_norm(alpha: float, powers) -> float:
    l, m, n = powers
    pref = (2.0 * alpha / np.pi) ** 0.75
    num = (4.0 * alpha) ** ((l + m + n) / 2.0)
    den = np.sqrt(
        _double_factorial(2 * l - 1)
        * _double_factorial(2 * m - 1)
        * _double_factorial(2 * n - 1)
    )
    return pref * num / den


def _contracted(center, powers, exponents, raw_coeffs) -> ContractedGaussian:
    coeffs = np.array(
        [c * primitive_norm(a, powers) for a, c in zip(exponents, raw_coeffs)]
    )
    # scale so the contracted function is unit-normalized
    l, m, n = powers
    s = 0.0
    for ca, a in zip(coeffs, exponents):
        for cb, b in zip(coeffs, exponents):
            p = a + b
            s += (
                ca
                * cb
                * (np.pi / p) ** 1.5
                * _double_factorial(2 * l - 1)
                * _double_factorial(2 * m - 1)
                * _double_factorial(2 * n - 1)
                / (2.0 * p) ** (l + m + n)
            )
    coeffs /= np.sqrt(s)
    return ContractedGaussian(
        tuple(float(x) for x in center),
        tuple(powers),
        tuple(float(a) for a in exponents),
        tuple(float(c) for c in coeffs),
    )


def build_basis(atoms, basis_name: str) -> list[ContractedGaussian]:
    """atoms: list of (symbol, (x, y, z)) in BOHR."""
    table = BASIS_SETS[basis_name.lower()]
    functions = []
    for symbol, center in atoms:
        for shell, exps, coeffs in table[symbol]:
            for powers in _CART[shell]:
                functions.append(_contracted(center, powers, exps, coeffs))
    return functions
