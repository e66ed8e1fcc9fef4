"""Circuit construction for separable-pair and k-UpCC{G}{A}{S}{D} ansaetze.

Circuits are built as a small gate IR: reference X gates, excitation
gates carrying their Hermitian generator, and plain CNOTs for the
occupation-copy bridge.  The compiler lowers this IR to the primitive
set {X, Ry, Rz, H, CNOT, CRy} at three optimization levels.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .paulis import (
    PauliSum,
    SpinLayout,
    excitation_generator,
    jordan_wigner,
    paired_generator_hcb,
    paired_generator_jw,
)


class AnsatzError(ValueError):
    pass


@dataclass(frozen=True)
class Param:
    """A named angle with a fixed multiplier: the gate angle is coeff * value."""

    name: str
    coeff: float = 1.0


@dataclass(frozen=True)
class Gate:
    kind: str  # X | H | RY | RZ | CNOT | CRY | CZ | PAULIROT | EXC
    qubits: tuple[int, ...]
    param: float | Param | None = None
    generator: PauliSum | None = None

    def __post_init__(self):
        arity = {"X": 1, "H": 1, "RY": 1, "RZ": 1, "CNOT": 2, "CRY": 2, "CZ": 2}
        if self.kind in arity and len(self.qubits) != arity[self.kind]:
            raise AnsatzError(f"{self.kind} expects {arity[self.kind]} qubit(s)")
        if len(set(self.qubits)) != len(self.qubits):
            raise AnsatzError("repeated qubit in gate")

    @property
    def param_name(self) -> str | None:
        return self.param.name if isinstance(self.param, Param) else None


@dataclass(frozen=True)
class Circuit:
    gates: tuple[Gate, ...]
    n_qubits: int
    parameters: tuple[str, ...] = field(default=())

    def __post_init__(self):
        names = []
        for g in self.gates:
            if any(q >= self.n_qubits or q < 0 for q in g.qubits):
                raise AnsatzError("gate qubit outside the register")
            if g.generator is not None and g.generator.max_qubit() >= self.n_qubits:
                raise AnsatzError("generator acts outside the register")
            name = g.param_name
            if name and name not in names:
                names.append(name)
        object.__setattr__(self, "parameters", tuple(names))

    @property
    def n_params(self) -> int:
        return len(self.parameters)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise AnsatzError("cannot concatenate circuits of different width")
        return Circuit(self.gates + other.gates, self.n_qubits)


@dataclass(frozen=True)
class AnsatzSpec:
    """Parsed ansatz flags: {HCB}-{SPA}-UpCC{G}{A}{S}{D} plus layer count."""

    spa: bool = False
    hcb: bool = False
    generalized: bool = False
    approximate: bool = False
    singles: bool = False
    doubles: bool = True
    k: int = 1
    arrangement: str = "ladder"
    shared_spin_singles: bool = False

    def __post_init__(self):
        if self.hcb and self.singles:
            raise AnsatzError("HCB circuits cannot carry singles (bridge removed)")
        if self.approximate and not self.singles:
            raise AnsatzError("approximate flag modifies singles; add S")
        if self.k < 1:
            raise AnsatzError("layer count must be >= 1")
        if self.arrangement not in ("ladder", "canonical"):
            raise AnsatzError(f"unknown arrangement {self.arrangement!r}")
        if not (self.doubles or self.singles or self.spa):
            raise AnsatzError("ansatz contains no excitations")


_NAME_PART = re.compile(r"^(UPCC)?(G)?(A)?(S)?(D)?$")


def parse_ansatz_name(name: str, arrangement: str = "ladder") -> AnsatzSpec:
    """Parse names like SPA, HCB-SPA, UpCCSD, 2-UpCCGSD, SPA-UpCCGD, SPA+GS."""
    s = name.strip().replace("+", "-")
    k = 1
    m = re.match(r"^(\d+)-(.+)$", s)
    if m:
        k = int(m.group(1))
        s = m.group(2)
    hcb = spa = False
    g = a = single = doub = False
    saw_excitation_part = False
    for part in filter(None, s.split("-")):
        up = part.upper()
        if up == "HCB":
            hcb = True
        elif up == "SPA":
            spa = True
        else:
            pm = _NAME_PART.match(up)
            if not pm or not any(pm.groups()):
                raise AnsatzError(f"cannot parse ansatz name part {part!r}")
            saw_excitation_part = True
            g = g or bool(pm.group(2))
            a = a or bool(pm.group(3))
            single = single or bool(pm.group(4))
            doub = doub or bool(pm.group(5))
    if not spa and not saw_excitation_part:
        raise AnsatzError(f"ansatz name {name!r} names no excitations")
    if not saw_excitation_part:
        doub = True  # plain SPA is SPA-UpCCD
    return AnsatzSpec(
        spa=spa,
        hcb=hcb,
        generalized=g,
        approximate=a,
        singles=single,
        doubles=doub or spa,
        k=k,
        arrangement=arrangement,
    )


# ---------------------------------------------------------------------------
# building blocks


def hcb_to_jw_bridge(n_active_orbitals: int, layout: SpinLayout | None = None) -> Circuit:
    """One CNOT per spatial orbital copying occupation to the spin-down
    register; all CNOTs act on disjoint pairs (one parallel layer)."""
    layout = layout or SpinLayout(n_active_orbitals)
    gates = tuple(
        Gate("CNOT", (layout.up(p), layout.down(p))) for p in range(n_active_orbitals)
    )
    return Circuit(gates, 2 * n_active_orbitals if n_active_orbitals else 0)


def _hcb_excitation(target: int, source: int, param: Param) -> Gate:
    gen = paired_generator_hcb(target, source)
    return Gate("EXC", (source, target), param=param, generator=gen)


def _jw_paired_excitation(target: int, source: int, layout: SpinLayout, param: Param) -> Gate:
    gen = paired_generator_jw(target, source, layout)
    qubits = (layout.up(source), layout.up(target), layout.down(source), layout.down(target))
    return Gate("EXC", qubits, param=param, generator=gen)


def _jw_single_excitation(
    target_q: int, source_q: int, n_qubits: int, param: Param, drop_z: bool
) -> Gate:
    if drop_z:
        gen = paired_generator_hcb(target_q, source_q)
    else:
        gen = jordan_wigner(excitation_generator([target_q], [source_q]), n_qubits)
    return Gate("EXC", (source_q, target_q), param=param, generator=gen)


def _pair_excitation_plan(orbitals: tuple[int, ...], arrangement: str) -> list[tuple[int, int]]:
    """(source, new) steps along one pair's orbital list."""
    if arrangement == "ladder":
        return [(orbitals[l], orbitals[l + 1]) for l in range(len(orbitals) - 1)]
    return [(orbitals[0], orbitals[l]) for l in range(1, len(orbitals))]


def build_spa(sys, arrangement: str = "ladder") -> Circuit:
    """Separable-pair circuit: per-pair excitation ladders in the
    hard-core-boson register, bridged to the Jordan-Wigner register."""
    return build_ansatz(sys, AnsatzSpec(spa=True, arrangement=arrangement))


def build_ansatz(sys, spec: AnsatzSpec) -> Circuit:
    n_orb = sys.n_orbitals
    n_pairs = sys.n_electrons // 2
    pair_sets = tuple(tuple(s) for s in sys.pair_sets)
    if not pair_sets:
        raise AnsatzError("system carries no pair assignment")
    layout = SpinLayout(n_orb)
    n_qubits = n_orb if spec.hcb else 2 * n_orb
    gates: list[Gate] = []

    refs = [s[0] for s in pair_sets]
    for r in refs:
        gates.append(Gate("X", (r,)))

    occ = sorted(refs)
    virt = [p for p in range(n_orb) if p not in occ]

    def double_index_pairs() -> list[tuple[int, int, str]]:
        out = []
        if spec.spa:
            for k, orbs in enumerate(pair_sets):
                seen = set()
                for j, (src, dst) in enumerate(_pair_excitation_plan(orbs, spec.arrangement)):
                    out.append((src, dst, f"t{k}_{j}"))
                    seen.add(frozenset((src, dst)))
                if spec.generalized and spec.doubles:
                    for i, p in enumerate(orbs):
                        for q in orbs[i + 1 :]:
                            if frozenset((p, q)) not in seen:
                                out.append((p, q, f"d1_{p}_{q}"))
        elif spec.generalized:
            out = [
                (p, q, f"d1_{p}_{q}")
                for p in range(n_orb)
                for q in range(p + 1, n_orb)
            ]
        else:
            out = [(i, v, f"d1_{i}_{v}") for i in occ for v in virt]
        return out

    def single_index_pairs() -> list[tuple[int, int]]:
        if spec.spa:
            out = []
            for orbs in pair_sets:
                if spec.generalized:
                    for i, p in enumerate(orbs):
                        out.extend((p, q) for q in orbs[i + 1 :])
                else:
                    out.extend((orbs[0], q) for q in orbs[1:])
            return out
        if spec.generalized:
            return [(p, q) for p in range(n_orb) for q in range(p + 1, n_orb)]
        return [(i, v) for i in occ for v in virt]

    doubles_plan = double_index_pairs() if (spec.doubles or spec.spa) else []
    for src, dst, name in doubles_plan:
        gates.append(_hcb_excitation(dst, src, Param(name)))

    if not spec.hcb:
        gates.extend(hcb_to_jw_bridge(n_orb, layout).gates)

    def append_singles(layer: int) -> None:
        for p, q in single_index_pairs():
            for spin_tag, up in (("a", True), ("b", False)):
                name = f"s{layer}_{p}_{q}" if spec.shared_spin_singles else f"s{layer}{spin_tag}_{p}_{q}"
                sq = (layout.up(p), layout.up(q)) if up else (layout.down(p), layout.down(q))
                gates.append(
                    _jw_single_excitation(sq[1], sq[0], n_qubits, Param(name), spec.approximate)
                )

    if spec.singles:
        append_singles(1)

    for layer in range(2, spec.k + 1):
        if spec.doubles or spec.spa:
            for src, dst, _ in doubles_plan:
                lname = f"d{layer}_{src}_{dst}"
                if spec.hcb:
                    gates.append(_hcb_excitation(dst, src, Param(lname)))
                else:
                    gates.append(_jw_paired_excitation(dst, src, layout, Param(lname)))
        if spec.singles:
            append_singles(layer)

    return Circuit(tuple(gates), n_qubits)


# ---------------------------------------------------------------------------
# structural inspection (used by the compiler and the pair simulator)


@dataclass(frozen=True)
class SpaStructure:
    refs: tuple[int, ...]
    hcb_doubles: tuple[tuple[int, int, Param | float], ...]  # (source, target, angle)
    bridged: bool
    n_orbitals: int
    pair_groups: tuple[tuple[int, ...], ...]


def _hop_endpoints(gen: PauliSum) -> tuple[int, int] | None:
    """(source, target) if gen is a two-qubit pair-hopping generator."""
    if len(gen) != 2:
        return None
    support = sorted({q for t in gen for q in t.factors})
    if len(support) != 2:
        return None
    a, b = support
    coeff = gen.coefficient_of({a: "X", b: "Y"})
    other = gen.coefficient_of({a: "Y", b: "X"})
    if abs(coeff.imag) > 1e-12 or abs(coeff + other) > 1e-12:
        return None
    if abs(coeff - (-0.5)) < 1e-12:
        return (b, a)  # creators on a: hop moves b into a
    if abs(coeff - 0.5) < 1e-12:
        return (a, b)
    return None


def analyze_spa_structure(circuit: Circuit) -> SpaStructure | None:
    """Detect the separable-pair shape: X block, per-pair hopping chains
    on disjoint qubit groups, then (optionally) the bridge layer."""
    refs: list[int] = []
    hops: list[tuple[int, int, Param | float]] = []
    bridge: list[tuple[int, int]] = []
    stage = 0
    for g in circuit.gates:
        if g.kind == "X" and stage == 0:
            refs.append(g.qubits[0])
        elif g.kind == "EXC" and stage <= 1:
            stage = 1
            ends = _hop_endpoints(g.generator) if g.generator is not None else None
            if ends is None:
                return None
            hops.append((ends[0], ends[1], g.param))
        elif g.kind == "CNOT" and stage <= 2:
            stage = 2
            bridge.append(g.qubits)
        else:
            return None
    bridged = bool(bridge)
    if bridged:
        n_orb = circuit.n_qubits // 2
        if sorted(bridge) != [(p, p + n_orb) for p in range(n_orb)]:
            return None
    else:
        n_orb = circuit.n_qubits
    owner: dict[int, int] = {}
    groups: list[list[int]] = []
    for r in refs:
        if r in owner or r >= n_orb:
            return None
        owner[r] = len(groups)
        groups.append([r])
    for src, dst, _ in hops:
        if src not in owner:
            return None
        k = owner[src]
        if dst in owner:
            if owner[dst] != k:
                return None
        else:
            owner[dst] = k
            groups[k].append(dst)
    return SpaStructure(
        refs=tuple(refs),
        hcb_doubles=tuple(hops),
        bridged=bridged,
        n_orbitals=n_orb,
        pair_groups=tuple(tuple(g) for g in groups),
    )


# ---------------------------------------------------------------------------
# text serialization (compiled circuits)

_SERIALIZABLE = {"X", "H", "RY", "RZ", "CNOT", "CRY", "CZ"}


def circuit_to_text(circuit: Circuit) -> str:
    lines = [f"QUBITS {circuit.n_qubits}"]
    for g in circuit.gates:
        if g.kind not in _SERIALIZABLE:
            raise AnsatzError(f"cannot serialize uncompiled gate kind {g.kind!r}")
        parts = [g.kind, *map(str, g.qubits)]
        if g.param is not None:
            if isinstance(g.param, Param):
                parts.append(g.param.name if g.param.coeff == 1.0 else f"{g.param.coeff!r}*{g.param.name}")
            else:
                parts.append(repr(float(g.param)))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> Circuit:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("QUBITS"):
        raise AnsatzError("circuit text must start with a QUBITS line")
    n_qubits = int(lines[0].split()[1])
    gates = []
    for ln in lines[1:]:
        tokens = ln.split()
        kind = tokens[0]
        if kind not in _SERIALIZABLE:
            raise AnsatzError(f"unknown gate kind {kind!r}")
        arity = 2 if kind in ("CNOT", "CRY", "CZ") else 1
        qubits = tuple(int(t) for t in tokens[1 : 1 + arity])
        param = None
        if len(tokens) > 1 + arity:
            tok = tokens[1 + arity]
            if "*" in tok:
                coeff, name = tok.split("*", 1)
                param = Param(name, float(coeff))
            else:
                try:
                    param = float(tok)
                except ValueError:
                    param = Param(tok)
        gates.append(Gate(kind, qubits, param=param))
    return Circuit(tuple(gates), n_qubits)
