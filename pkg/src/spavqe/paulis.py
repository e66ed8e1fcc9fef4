"""Pauli and fermionic operator algebra with the Jordan-Wigner encoding.

Conventions used throughout the package:

* qubit |1> means "spin orbital occupied"; creation maps to
  ``(X - iY)/2`` dressed with a Z string on all lower qubit indices,
  so the number operator is ``(1 - Z)/2``.
* Pauli strings are stored in symplectic form (an X mask and a Z mask
  plus a coefficient); multiplication is two XORs and a popcount sign.
* excitation generators are Hermitian with eigenvalues {-1, 0, +1};
  creators are listed first, i.e. ``excitation_generator([p], [q])``
  moves occupation from q to p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

DROP_TOLERANCE = 1e-12

_AXIS_TO_XZ = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class SpinLayout:
    """Maps spatial orbitals to spin-orbital qubits.

    The default blocked layout puts all spin-up orbitals on qubits
    0..n_orbitals-1 and spin-down on n_orbitals..2*n_orbitals-1, which
    keeps the hard-core-boson register identical to the up block and
    makes the HCB-to-JW bridge a single parallel CNOT layer.
    """

    n_orbitals: int
    ordering: str = "blocked"

    def __post_init__(self):
        if self.ordering not in ("blocked", "interleaved"):
            raise ValueError(f"unknown spin layout ordering {self.ordering!r}")

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_orbitals

    def up(self, p: int) -> int:
        self._check(p)
        return p if self.ordering == "blocked" else 2 * p

    def down(self, p: int) -> int:
        self._check(p)
        return p + self.n_orbitals if self.ordering == "blocked" else 2 * p + 1

    def _check(self, p: int) -> None:
        if not 0 <= p < self.n_orbitals:
            raise IndexError(f"orbital {p} outside 0..{self.n_orbitals - 1}")


class PauliString:
    """A single weighted Pauli string.

    Internally ``coeff * X^x Z^z`` with per-qubit bitmasks; the public
    ``factors``/``coefficient`` view uses the conventional X/Y/Z letters
    (Y = iXZ, phases are folded into the stored coefficient).
    """

    __slots__ = ("x", "z", "_coeff")

    def __init__(self, factors: Mapping[int, str] | None = None, coefficient: complex = 1.0):
        x = z = 0
        n_y = 0
        for q, axis in (factors or {}).items():
            if q < 0:
                raise IndexError(f"negative qubit index {q}")
            bit = 1 << q
            if x & bit or z & bit:
                raise ValueError(f"qubit {q} listed twice")
            ax, az = _AXIS_TO_XZ[axis]
            x |= bit * ax
            z |= bit * az
            n_y += ax & az
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "_coeff", complex(coefficient) * (1j ** (n_y % 4)))

    @classmethod
    def _from_masks(cls, x: int, z: int, stored_coeff: complex) -> "PauliString":
        s = cls.__new__(cls)
        object.__setattr__(s, "x", x)
        object.__setattr__(s, "z", z)
        object.__setattr__(s, "_coeff", complex(stored_coeff))
        return s

    def __setattr__(self, *_):
        raise AttributeError("PauliString is immutable")

    @property
    def factors(self) -> dict[int, str]:
        out = {}
        both = self.x | self.z
        q = 0
        while both >> q:
            bit = 1 << q
            if both & bit:
                if self.x & bit and self.z & bit:
                    out[q] = "Y"
                elif self.x & bit:
                    out[q] = "X"
                else:
                    out[q] = "Z"
            q += 1
        return out

    @property
    def coefficient(self) -> complex:
        n_y = _popcount(self.x & self.z)
        return self._coeff * ((-1j) ** (n_y % 4))

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def max_qubit(self) -> int:
        both = self.x | self.z
        return both.bit_length() - 1 if both else -1

    def with_coefficient(self, coefficient: complex) -> "PauliString":
        n_y = _popcount(self.x & self.z)
        return PauliString._from_masks(self.x, self.z, complex(coefficient) * (1j ** (n_y % 4)))

    def adjoint(self) -> "PauliString":
        sign = (-1) ** (_popcount(self.x & self.z) % 2)
        return PauliString._from_masks(self.x, self.z, sign * self._coeff.conjugate())

    def __mul__(self, other):
        if isinstance(other, PauliString):
            sign = (-1) ** (_popcount(self.z & other.x) % 2)
            return PauliString._from_masks(
                self.x ^ other.x, self.z ^ other.z, sign * self._coeff * other._coeff
            )
        return PauliString._from_masks(self.x, self.z, self._coeff * complex(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def __eq__(self, other):
        return (
            isinstance(other, PauliString)
            and self.x == other.x
            and self.z == other.z
            and self._coeff == other._coeff
        )

    def __hash__(self):
        return hash((self.x, self.z, self._coeff))

    def __repr__(self):
        if self.is_identity:
            body = "I"
        else:
            body = " ".join(f"{ax}{q}" for q, ax in sorted(self.factors.items()))
        return f"({self.coefficient:.6g}) {body}"


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Product of two Pauli strings, phase included."""
    return a * b


def identity_string(coefficient: complex = 1.0) -> PauliString:
    return PauliString({}, coefficient)


class PauliSum:
    """A weighted sum of Pauli strings, kept simplified.

    Terms sharing a factor map are merged and coefficients below the
    drop tolerance are removed on construction, so two sums are equal
    iff their term dictionaries are.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[PauliString] = (), drop_tolerance: float = DROP_TOLERANCE):
        acc: dict[tuple[int, int], complex] = {}
        for t in terms:
            key = (t.x, t.z)
            acc[key] = acc.get(key, 0.0) + t._coeff
        cleaned = {k: c for k, c in acc.items() if abs(c) > drop_tolerance}
        object.__setattr__(
            self,
            "_terms",
            tuple(
                PauliString._from_masks(x, z, cleaned[(x, z)])
                for (x, z) in sorted(cleaned)
            ),
        )

    def __setattr__(self, *_):
        raise AttributeError("PauliSum is immutable")

    @property
    def terms(self) -> tuple[PauliString, ...]:
        return self._terms

    def __iter__(self) -> Iterator[PauliString]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def max_qubit(self) -> int:
        return max((t.max_qubit() for t in self._terms), default=-1)

    def coefficient_of(self, factors: Mapping[int, str]) -> complex:
        probe = PauliString(factors)
        for t in self._terms:
            if t.x == probe.x and t.z == probe.z:
                return t.coefficient * probe.coefficient.conjugate()
        return 0.0

    def adjoint(self) -> "PauliSum":
        return PauliSum(t.adjoint() for t in self._terms)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return not (self - self.adjoint()).terms or all(
            abs(t._coeff) <= tol for t in (self - self.adjoint())._terms
        )

    def __add__(self, other):
        if isinstance(other, PauliSum):
            return PauliSum((*self._terms, *other._terms))
        if isinstance(other, PauliString):
            return PauliSum((*self._terms, other))
        return PauliSum((*self._terms, identity_string(complex(other))))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (other * -1.0)

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            return PauliSum(a * b for a in self._terms for b in other._terms)
        if isinstance(other, PauliString):
            return PauliSum(a * other for a in self._terms)
        return PauliSum(t * complex(other) for t in self._terms)

    def __rmul__(self, other):
        if isinstance(other, PauliString):
            return PauliSum(other * t for t in self._terms)
        return self * other

    def __neg__(self):
        return self * (-1.0)

    def __eq__(self, other):
        return isinstance(other, PauliSum) and self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def __repr__(self):
        if not self._terms:
            return "0"
        return " + ".join(repr(t) for t in self._terms)


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    return a * b - b * a


class FermionOperator:
    """Sum of products of fermionic ladder operators.

    Each product is an ordered tuple of ``(orbital_index, is_creation)``
    applied right to left like any operator product; the empty product
    is a scalar.
    """

    __slots__ = ("_products",)

    def __init__(self, products: Iterable[tuple[Sequence[tuple[int, bool]], complex]] = ()):
        cleaned = []
        for ops, coeff in products:
            ops = tuple((int(i), bool(dag)) for i, dag in ops)
            for i, _ in ops:
                if i < 0:
                    raise IndexError(f"negative orbital index {i}")
            if abs(coeff) > 0.0:
                cleaned.append((ops, complex(coeff)))
        object.__setattr__(self, "_products", tuple(cleaned))

    def __setattr__(self, *_):
        raise AttributeError("FermionOperator is immutable")

    @property
    def products(self):
        return self._products

    @classmethod
    def creation(cls, p: int, coefficient: complex = 1.0) -> "FermionOperator":
        return cls([(((p, True),), coefficient)])

    @classmethod
    def annihilation(cls, p: int, coefficient: complex = 1.0) -> "FermionOperator":
        return cls([(((p, False),), coefficient)])

    @classmethod
    def scalar(cls, coefficient: complex) -> "FermionOperator":
        return cls([((), coefficient)])

    def adjoint(self) -> "FermionOperator":
        return FermionOperator(
            [
                (tuple((i, not dag) for i, dag in reversed(ops)), coeff.conjugate())
                for ops, coeff in self._products
            ]
        )

    def max_index(self) -> int:
        return max((i for ops, _ in self._products for i, _ in ops), default=-1)

    def __add__(self, other):
        if isinstance(other, FermionOperator):
            return FermionOperator((*self._products, *other._products))
        return FermionOperator((*self._products, ((), complex(other))))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (other * -1.0)

    def __mul__(self, other):
        if isinstance(other, FermionOperator):
            return FermionOperator(
                [
                    (a_ops + b_ops, a_c * b_c)
                    for a_ops, a_c in self._products
                    for b_ops, b_c in other._products
                ]
            )
        return FermionOperator([(ops, c * complex(other)) for ops, c in self._products])

    def __rmul__(self, other):
        return self * other

    def __neg__(self):
        return self * (-1.0)

    def __repr__(self):
        def fmt(ops):
            if not ops:
                return "1"
            return " ".join(f"a{'^' if dag else ''}{i}" for i, dag in ops)

        return " + ".join(f"({c:.6g}) {fmt(ops)}" for ops, c in self._products) or "0"


def _jw_ladder(p: int, creation: bool) -> PauliSum:
    z_tail = {k: "Z" for k in range(p)}
    sign = -0.5j if creation else 0.5j
    return PauliSum(
        (
            PauliString({**z_tail, p: "X"}, 0.5),
            PauliString({**z_tail, p: "Y"}, sign),
        )
    )


def jordan_wigner(op: FermionOperator, n_spin_orbitals: int) -> PauliSum:
    """Qubit image of a fermionic operator under the Jordan-Wigner map."""
    if op.max_index() >= n_spin_orbitals:
        raise IndexError(
            f"orbital index {op.max_index()} out of range for {n_spin_orbitals} spin orbitals"
        )
    total: list[PauliString] = []
    for ops, coeff in op.products:
        acc = [identity_string(coeff)]
        for idx, dag in ops:
            image = _jw_ladder(idx, dag)
            acc = [a * b for a in acc for b in image]
        total.extend(acc)
    return PauliSum(total)


def excitation_generator(creators: Sequence[int], annihilators: Sequence[int]) -> FermionOperator:
    """Hermitian n-electron excitation generator i(prod a^_p a_q - h.c.)."""
    p = list(creators)
    q = list(annihilators)
    if len(p) != len(q) or not p:
        raise ValueError("creators and annihilators must have equal nonzero length")
    if set(p) & set(q):
        raise ValueError(f"creators and annihilators overlap: {sorted(set(p) & set(q))}")
    if len(set(p)) != len(p) or len(set(q)) != len(q):
        raise ValueError("repeated index within creators or annihilators")
    t = FermionOperator.scalar(1.0)
    for pk, qk in zip(p, q):
        t = t * FermionOperator.creation(pk) * FermionOperator.annihilation(qk)
    return t * 1j + t.adjoint() * (-1j)


def excitation_nullspace_projector(
    creators: Sequence[int], annihilators: Sequence[int]
) -> FermionOperator:
    """Projector onto configurations the excitation gate leaves untouched."""
    p = list(creators)
    q = list(annihilators)
    occ_p = FermionOperator.scalar(1.0)
    occ_q = FermionOperator.scalar(1.0)
    for pk, qk in zip(p, q):
        occ_p = (
            occ_p
            * FermionOperator.creation(pk)
            * FermionOperator.annihilation(pk)
            * FermionOperator.annihilation(qk)
            * FermionOperator.creation(qk)
        )
        occ_q = (
            occ_q
            * FermionOperator.creation(qk)
            * FermionOperator.annihilation(qk)
            * FermionOperator.annihilation(pk)
            * FermionOperator.creation(pk)
        )
    return FermionOperator.scalar(1.0) - occ_p - occ_q


def paired_generator_jw(p: int, q: int, layout: SpinLayout) -> PauliSum:
    """Pair-double excitation generator in qubit form (Z strings cancel).

    Equals the Jordan-Wigner image of the fermionic generator restricted
    to the four involved spin orbitals: eight weight-4 strings with
    coefficients +-1/8 and no Z factors, for any spatial p != q.
    """
    if p == q:
        raise ValueError("paired excitation requires two distinct spatial orbitals")
    up_p, dn_p = layout.up(p), layout.down(p)
    up_q, dn_q = layout.up(q), layout.down(q)
    t = _sigma_plus(up_p) * _sigma_minus(up_q) * _sigma_plus(dn_p) * _sigma_minus(dn_q)
    return t * 1j + t.adjoint() * (-1j)


def paired_generator_hcb(p: int, q: int) -> PauliSum:
    """Pair-hopping generator on the hard-core-boson register.

    i(s+_p s-_q - h.c.) with the same raising/lowering convention as the
    Jordan-Wigner map, i.e. (Y_p X_q - X_p Y_q)/2; moving a pair from q
    to p at theta=pi acquires no phase (recorded in the test suite).
    """
    if p == q:
        raise ValueError("pair hopping requires two distinct orbitals")
    t = _sigma_plus(p) * _sigma_minus(q)
    return t * 1j + t.adjoint() * (-1j)


def _sigma_plus(q: int) -> PauliSum:
    return PauliSum((PauliString({q: "X"}, 0.5), PauliString({q: "Y"}, -0.5j)))


def _sigma_minus(q: int) -> PauliSum:
    return PauliSum((PauliString({q: "X"}, 0.5), PauliString({q: "Y"}, 0.5j)))


def number_operator(n_qubits: int) -> PauliSum:
    """Total occupation number as a Pauli sum, sum_p (1 - Z_p)/2."""
    terms = [identity_string(0.5 * n_qubits)]
    terms.extend(PauliString({p: "Z"}, -0.5) for p in range(n_qubits))
    return PauliSum(terms)
