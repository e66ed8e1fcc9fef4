"""Circuit and Hamiltonian evaluation backends.

Three state representations are supported: a full statevector on the
Jordan-Wigner register, the same on the reduced hard-core-boson
register, and a linear-memory separable-pair representation holding one
amplitude vector per electron pair.  Basis states are little-endian:
qubit 0 is the least significant bit of the configuration index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .circuits import Circuit, Gate, Param
from .paulis import PauliString, PauliSum

DEFAULT_QUBIT_CAP = 28


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class Statevector:
    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        if self.amplitudes.shape != (2**self.n_qubits,):
            raise SimulationError("amplitude vector length does not match qubit count")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class PairWavefunction:
    """One complex amplitude vector per pair: entry l is the amplitude of
    the pair occupying its l-th orbital.  Memory is sum_k |S_k|."""

    pair_amplitudes: tuple[np.ndarray, ...]
    pair_orbitals: tuple[tuple[int, ...], ...]
    n_qubits: int
    bridged: bool

    @property
    def n_orbitals(self) -> int:
        return self.n_qubits // 2 if self.bridged else self.n_qubits

    @property
    def total_amplitudes(self) -> int:
        return sum(v.size for v in self.pair_amplitudes)


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    sector: int | None
    basis_states: np.ndarray | None = None


# ---------------------------------------------------------------------------
# gate application


def _single_qubit(amps: np.ndarray, n: int, q: int, mat: np.ndarray) -> np.ndarray:
    view = amps.reshape(2 ** (n - q - 1), 2, 2**q)
    a, b = view[:, 0, :].copy(), view[:, 1, :]
    view[:, 0, :] = mat[0, 0] * a + mat[0, 1] * b
    view[:, 1, :] = mat[1, 0] * a + mat[1, 1] * b
    return amps


def _controlled_single(amps, n, control, target, mat):
    idx = np.arange(2**n)
    sel = (idx >> control) & 1 == 1
    i0 = idx[sel & (((idx >> target) & 1) == 0)]
    i1 = i0 | (1 << target)
    a, b = amps[i0].copy(), amps[i1]
    amps[i0] = mat[0, 0] * a + mat[0, 1] * b
    amps[i1] = mat[1, 0] * a + mat[1, 1] * b
    return amps


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


_X = np.array([[0, 1], [1, 0]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


@lru_cache(maxsize=16)
def _indices(n: int) -> np.ndarray:
    return np.arange(2**n, dtype=np.int64)


def _parity(values: np.ndarray) -> np.ndarray:
    v = values.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> shift
    return v & 1


def apply_pauli_string(amps: np.ndarray, n: int, term: PauliString) -> np.ndarray:
    """Return term @ amps for one weighted Pauli string."""
    idx = _indices(n)
    signs = 1.0 - 2.0 * _parity(idx & term.z)
    out = np.empty_like(amps)
    out[idx ^ term.x] = term._coeff * signs * amps
    return out


def apply_pauli_sum(amps: np.ndarray, n: int, op: PauliSum) -> np.ndarray:
    out = np.zeros_like(amps)
    idx = _indices(n)
    for term in op:
        signs = 1.0 - 2.0 * _parity(idx & term.z)
        np.add.at(out, idx ^ term.x, term._coeff * signs * amps)
    return out


def _resolve_angle(gate: Gate, params: dict[str, float]) -> float:
    p = gate.param
    if p is None:
        raise SimulationError(f"{gate.kind} gate carries no angle")
    if isinstance(p, Param):
        if p.name not in params:
            raise SimulationError(f"unassigned parameter {p.name!r}")
        return p.coeff * params[p.name]
    return float(p)


def _apply_gate(amps: np.ndarray, n: int, gate: Gate, params: dict[str, float]) -> np.ndarray:
    kind = gate.kind
    if kind == "X":
        return _single_qubit(amps, n, gate.qubits[0], _X)
    if kind == "H":
        return _single_qubit(amps, n, gate.qubits[0], _H)
    if kind == "RY":
        return _single_qubit(amps, n, gate.qubits[0], _ry(_resolve_angle(gate, params)))
    if kind == "RZ":
        return _single_qubit(amps, n, gate.qubits[0], _rz(_resolve_angle(gate, params)))
    if kind == "CNOT":
        return _controlled_single(amps, n, gate.qubits[0], gate.qubits[1], _X)
    if kind == "CZ":
        idx = _indices(n)
        both = ((idx >> gate.qubits[0]) & 1) & ((idx >> gate.qubits[1]) & 1)
        amps[both == 1] *= -1.0
        return amps
    if kind == "CRY":
        return _controlled_single(
            amps, n, gate.qubits[0], gate.qubits[1], _ry(_resolve_angle(gate, params))
        )
    if kind == "PAULIROT":
        theta = _resolve_angle(gate, params)
        rotated = apply_pauli_string(amps, n, gate.generator.terms[0])
        return np.cos(theta / 2) * amps - 1j * np.sin(theta / 2) * rotated
    if kind == "EXC":
        # generator g satisfies g^3 = g, so the exponential closes after g^2
        theta = _resolve_angle(gate, params)
        g_amps = apply_pauli_sum(amps, n, gate.generator)
        gg_amps = apply_pauli_sum(g_amps, n, gate.generator)
        return amps + (np.cos(theta / 2) - 1.0) * gg_amps - 1j * np.sin(theta / 2) * g_amps
    raise SimulationError(f"cannot simulate gate kind {kind!r}")


def simulate(
    circuit: Circuit,
    params: dict[str, float] | None = None,
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> Statevector:
    """Apply the circuit to |0...0> and return the exact statevector."""
    if circuit.n_qubits > qubit_cap:
        raise SimulationError(
            f"{circuit.n_qubits} qubits exceeds the statevector cap of {qubit_cap}"
        )
    params = dict(params or {})
    missing = [p for p in circuit.parameters if p not in params]
    if missing:
        raise SimulationError(f"unassigned parameters: {missing}")
    amps = np.zeros(2**circuit.n_qubits, dtype=complex)
    amps[0] = 1.0
    for gate in circuit.gates:
        amps = _apply_gate(amps, circuit.n_qubits, gate, params)
    return Statevector(amps, circuit.n_qubits)


def circuit_unitary(circuit: Circuit, params: dict[str, float] | None = None) -> np.ndarray:
    """Dense unitary of the circuit (test-scale sizes only)."""
    dim = 2**circuit.n_qubits
    params = dict(params or {})
    cols = np.eye(dim, dtype=complex)
    for gate in circuit.gates:
        for j in range(dim):
            cols[:, j] = _apply_gate(cols[:, j].copy(), circuit.n_qubits, gate, params)
    return cols


# ---------------------------------------------------------------------------
# separable-pair simulation


def simulate_separable(circuit: Circuit, params: dict[str, float] | None = None) -> PairWavefunction:
    """Evaluate a separable-pair circuit with O(sum |S_k|) memory.

    The circuit must consist of reference X gates, pair-hopping
    excitations confined to disjoint qubit groups, and optionally the
    bridge CNOT layer; anything else is rejected.
    """
    from .circuits import analyze_spa_structure

    params = dict(params or {})
    structure = analyze_spa_structure(circuit)
    if structure is None:
        raise SimulationError("circuit does not have separable-pair structure")
    orbit_lists = [list(g) for g in structure.pair_groups]
    owner = {q: k for k, orbs in enumerate(orbit_lists) for q in orbs}
    vectors = [np.zeros(len(orbs), dtype=complex) for orbs in orbit_lists]
    for v in vectors:
        v[0] = 1.0
    for src, dst, angle in structure.hcb_doubles:
        if isinstance(angle, Param):
            if angle.name not in params:
                raise SimulationError(f"unassigned parameter {angle.name!r}")
            theta = angle.coeff * params[angle.name]
        else:
            theta = float(angle)
        k = owner[src]
        orbs = orbit_lists[k]
        i, j = orbs.index(src), orbs.index(dst)
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        vi, vj = vectors[k][i], vectors[k][j]
        vectors[k][i] = c * vi - s * vj
        vectors[k][j] = s * vi + c * vj
    return PairWavefunction(
        pair_amplitudes=tuple(vectors),
        pair_orbitals=tuple(tuple(orbs) for orbs in orbit_lists),
        n_qubits=circuit.n_qubits,
        bridged=structure.bridged,
    )


def embed_pair_wavefunction(pw: PairWavefunction) -> Statevector:
    """Expand the pair representation into the full register (tests)."""
    amps = np.zeros(2**pw.n_qubits, dtype=complex)
    n_orb = pw.n_orbitals
    configs = [0]
    weights = [1.0 + 0j]
    for orbs, vec in zip(pw.pair_orbitals, pw.pair_amplitudes):
        new_c, new_w = [], []
        for c, w in zip(configs, weights):
            for q, amp in zip(orbs, vec):
                bits = 1 << q
                if pw.bridged:
                    bits |= 1 << (q + n_orb)
                new_c.append(c | bits)
                new_w.append(w * amp)
        configs, weights = new_c, new_w
    for c, w in zip(configs, weights):
        amps[c] += w
    return Statevector(amps, pw.n_qubits)


# ---------------------------------------------------------------------------
# expectation values


def expectation(state: Statevector | PairWavefunction, op: PauliSum) -> float:
    """<psi|op|psi>; the pair representation is evaluated term by term
    using the product structure, never expanding the full register."""
    if isinstance(state, Statevector):
        if op.max_qubit() >= state.n_qubits:
            raise SimulationError("operator acts outside the register")
        val = np.vdot(state.amplitudes, apply_pauli_sum(state.amplitudes, state.n_qubits, op))
        return float(val.real)
    return _pair_expectation(state, op)


def _term_on_config(factors: dict[int, str], config: int) -> tuple[int, complex]:
    """Apply a Pauli product to a basis bitstring: (new config, phase)."""
    phase = 1.0 + 0j
    for q, axis in factors.items():
        bit = (config >> q) & 1
        if axis == "Z":
            phase *= 1.0 - 2.0 * bit
        elif axis == "X":
            config ^= 1 << q
        else:  # Y
            phase *= 1j * (1.0 - 2.0 * bit)
            config ^= 1 << q
    return config, phase


def _pair_expectation(pw: PairWavefunction, op: PauliSum) -> float:
    if op.max_qubit() >= pw.n_qubits:
        raise SimulationError("operator acts outside the register")
    n_orb = pw.n_orbitals
    qubit_owner: dict[int, int] = {}
    for k, orbs in enumerate(pw.pair_orbitals):
        for q in orbs:
            qubit_owner[q] = k
            if pw.bridged:
                qubit_owner[q + n_orb] = k
    pair_configs = []
    for orbs in pw.pair_orbitals:
        cfgs = []
        for q in orbs:
            c = 1 << q
            if pw.bridged:
                c |= 1 << (q + n_orb)
            cfgs.append(c)
        pair_configs.append(cfgs)

    total = 0.0 + 0j
    for term in op:
        factors = term.factors
        by_pair: dict[int, dict[int, str]] = {}
        fixed_ok = True
        for q, axis in factors.items():
            k = qubit_owner.get(q)
            if k is None:
                if axis != "Z":  # untouched qubits stay |0>
                    fixed_ok = False
                    break
            else:
                by_pair.setdefault(k, {})[q] = axis
        if not fixed_ok:
            continue
        value = term.coefficient
        for k, sub in by_pair.items():
            vec = pw.pair_amplitudes[k]
            cfgs = pair_configs[k]
            m = 0.0 + 0j
            for l, cfg in enumerate(cfgs):
                new_cfg, phase = _term_on_config(sub, cfg)
                try:
                    l2 = cfgs.index(new_cfg)
                except ValueError:
                    continue
                m += np.conj(vec[l2]) * phase * vec[l]
            value *= m
            if value == 0:
                break
        total += value
    return float(total.real)


@lru_cache(maxsize=64)
def _squared(op: PauliSum) -> PauliSum:
    return op * op


def variance(state: Statevector | PairWavefunction, op: PauliSum) -> float:
    """|<H^2> - <H>^2| via exact symbolic squaring (cached per operator)."""
    mean = expectation(state, op)
    return abs(expectation(state, _squared(op)) - mean**2)


def fidelity(a: Statevector, b: Statevector) -> float:
    if a.n_qubits != b.n_qubits:
        raise SimulationError("fidelity requires equal register sizes")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


# ---------------------------------------------------------------------------
# exact diagonalization


def _sector_states(n_qubits: int, n_particles: int) -> np.ndarray:
    states = [
        sum(1 << q for q in occ) for occ in combinations(range(n_qubits), n_particles)
    ]
    return np.array(sorted(states), dtype=np.int64)


def dense_matrix(op: PauliSum, n_qubits: int) -> np.ndarray:
    dim = 2**n_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    idx = _indices(n_qubits)
    for term in op:
        signs = 1.0 - 2.0 * _parity(idx & term.z)
        mat[idx ^ term.x, idx] += term._coeff * signs
    return mat


def exact_spectrum(
    op: PauliSum,
    n_qubits: int,
    n_particles: int | None = None,
    with_vectors: bool = True,
) -> SpectrumResult:
    """Eigenpairs of a Hermitian Pauli sum, optionally restricted to a
    fixed-particle-number sector (dense mode, <= 16 qubits)."""
    if n_qubits > 16:
        raise SimulationError("dense diagonalization capped at 16 qubits")
    if op.max_qubit() >= n_qubits:
        raise SimulationError("operator acts outside the register")
    if n_particles is None:
        mat = dense_matrix(op, n_qubits)
        basis = None
    else:
        states = _sector_states(n_qubits, n_particles)
        pos = {int(s): i for i, s in enumerate(states)}
        dim = len(states)
        mat = np.zeros((dim, dim), dtype=complex)
        for term in op:
            signs = 1.0 - 2.0 * _parity(states & term.z)
            targets = states ^ term.x
            for i in range(dim):
                j = pos.get(int(targets[i]))
                if j is not None:
                    mat[j, i] += term._coeff * signs[i]
        basis = states
    evals, evecs = np.linalg.eigh(mat)
    return SpectrumResult(
        eigenvalues=evals,
        eigenvectors=evecs if with_vectors else None,
        sector=n_particles,
        basis_states=basis,
    )


def sector_vector_to_statevector(result: SpectrumResult, column: int, n_qubits: int) -> Statevector:
    """Lift an eigenvector from a particle-number sector to the full register."""
    amps = np.zeros(2**n_qubits, dtype=complex)
    if result.basis_states is None:
        amps[:] = result.eigenvectors[:, column]
    else:
        amps[result.basis_states] = result.eigenvectors[:, column]
    return Statevector(amps, n_qubits)


def save_statevector(state: Statevector, path) -> None:
    """Dump amplitudes as little-endian complex doubles (debug aid)."""
    state.amplitudes.astype("<c16").tofile(path)


def load_statevector(path, n_qubits: int) -> Statevector:
    amps = np.fromfile(path, dtype="<c16")
    return Statevector(amps.astype(complex), n_qubits)
