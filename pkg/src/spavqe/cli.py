"""Command-line surface: resource counts, circuit compilation dumps,
variational optimization runs and geometry scans.

Exit codes: 0 success, 2 usage/grammar error, 3 input error,
4 optimizer failure.  Worker count for scans comes from SPAVQE_WORKERS.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import glob as globlib
import io
import json
import os
import sys as _sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict

from . import __version__
from .circuits import AnsatzError, build_ansatz, circuit_to_text, parse_ansatz_name
from .compiler import CompileError, compile_circuit, resources
from .molecule import MoleculeError, build_hcb_hamiltonian, build_qubit_hamiltonian, parse_fcidump
from .simulators import exact_spectrum, simulate, variance
from .vqe import OptimizationError, OptimizeConfig, minimize, optimize_orbitals

EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_OPTIMIZER = 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _load_system(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_fcidump(fh.read())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_INPUT) from exc
    except MoleculeError as exc:
        raise CliError(f"invalid FCIDUMP {path}: {exc}", EXIT_INPUT) from exc


def _parse_name(name, arrangement):
    try:
        return parse_ansatz_name(name, arrangement=arrangement)
    except AnsatzError as exc:
        raise CliError(f"invalid ansatz name {name!r}: {exc}", EXIT_USAGE) from exc


def _build(sys_, spec):
    try:
        return build_ansatz(sys_, spec)
    except AnsatzError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc


def _timestamp():
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def cmd_resources(args) -> int:
    sys_ = _load_system(args.fcidump)
    spec = _parse_name(args.ansatz, args.direct_compiling)
    circuit = _build(sys_, spec)
    try:
        compiled = compile_circuit(circuit, args.level)
    except CompileError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    rep = resources(compiled)
    payload = {
        "input": args.fcidump,
        "ansatz": args.ansatz,
        "level": args.level,
        "n_params": rep.n_params,
        "n_cnot": rep.n_cnot,
        "n_cz": rep.n_cz,
        "depth": rep.depth,
        "n_qubits": rep.n_qubits,
    }
    if args.json:
        print(json.dumps(payload, indent=1))
    else:
        print(f"ansatz     {args.ansatz} (level {args.level})")
        print(f"n_qubits   {rep.n_qubits}")
        print(f"n_params   {rep.n_params}")
        cz = f"  (+{rep.n_cz} cz)" if rep.n_cz else ""
        print(f"n_cnot     {rep.n_cnot}{cz}")
        print(f"depth      {rep.depth}")
    return 0


def cmd_compile(args) -> int:
    sys_ = _load_system(args.fcidump)
    spec = _parse_name(args.ansatz, args.direct_compiling)
    circuit = _build(sys_, spec)
    try:
        compiled = compile_circuit(circuit, args.level)
        text = circuit_to_text(compiled)
    except (CompileError, AnsatzError) as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def _run_report(args, sys_, spec, result, rep, fci_energy, variances, oo):
    report = {
        "tool": {"name": "spavqe", "version": __version__},
        "input": args.fcidump,
        "ansatz": args.ansatz,
        "seed": args.seed,
        "orbital_optimized": oo,
        "n_qubits": rep.n_qubits,
        "resources": {
            "n_params": rep.n_params,
            "n_cnot": rep.n_cnot,
            "n_cz": rep.n_cz,
            "depth": rep.depth,
            "n_qubits": rep.n_qubits,
        },
        "result": {
            "energy": result.energy,
            "params": result.params,
            "iterations": result.iterations,
            "n_energy_evals": result.n_energy_evals,
            "n_gradient_evals": result.n_gradient_evals,
            "grad_norm_final": result.grad_norm_final,
            "history": list(result.history),
        },
        "timestamps": {"started": args._started, "finished": _timestamp()},
    }
    if fci_energy is not None:
        report["fci_energy"] = fci_energy
    if variances is not None:
        report["variance"] = variances
    return report


def cmd_optimize(args) -> int:
    args._started = _timestamp()
    sys_ = _load_system(args.fcidump)
    spec = _parse_name(args.ansatz, args.direct_compiling)
    hcb = spec.hcb
    config = OptimizeConfig(
        tol_grad=args.tol_grad, max_iter=args.max_iter, n_starts=args.starts, seed=args.seed
    )
    try:
        if args.oo:
            sys_, result = optimize_orbitals(
                sys_, lambda s: build_ansatz(s, spec), config, hcb=hcb
            )
            circuit = build_ansatz(sys_, spec)
        else:
            circuit = _build(sys_, spec)
            hamiltonian = build_hcb_hamiltonian(sys_) if hcb else build_qubit_hamiltonian(sys_)
            result = minimize(circuit, hamiltonian, config)
    except AnsatzError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    except OptimizationError as exc:
        raise CliError(str(exc), EXIT_OPTIMIZER) from exc

    hamiltonian = build_hcb_hamiltonian(sys_) if hcb else build_qubit_hamiltonian(sys_)
    try:
        compiled = compile_circuit(circuit, 2)
    except CompileError:
        compiled = compile_circuit(circuit, 1)
    rep = resources(compiled)

    fci_energy = None
    if args.fci:
        n_q = sys_.n_orbitals if hcb else sys_.n_qubits
        n_part = sys_.n_electrons // 2 if hcb else sys_.n_electrons
        fci_energy = float(
            exact_spectrum(hamiltonian, n_q, n_particles=n_part, with_vectors=False).eigenvalues[0]
        )
    variances = None
    if args.variance:
        hf_state = simulate(circuit, {p: 0.0 for p in circuit.parameters})
        opt_state = simulate(circuit, result.params)
        variances = {
            "hf": float(variance(hf_state, hamiltonian)),
            "optimized": float(variance(opt_state, hamiltonian)),
        }
    report = _run_report(args, sys_, spec, result, rep, fci_energy, variances, args.oo)
    text = json.dumps(report, indent=1)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _scan_one(task):
    path, method, seed, arrangement, want_fci = task
    sys_ = parse_fcidump(open(path, "r", encoding="utf-8").read())
    fci_energy = None
    if want_fci or method.upper() == "FCI":
        hamiltonian = build_qubit_hamiltonian(sys_)
        fci_energy = float(
            exact_spectrum(
                hamiltonian, sys_.n_qubits, n_particles=sys_.n_electrons, with_vectors=False
            ).eigenvalues[0]
        )
    if method.upper() == "FCI":
        return fci_energy, fci_energy
    spec = parse_ansatz_name(method, arrangement=arrangement)
    hamiltonian = build_hcb_hamiltonian(sys_) if spec.hcb else build_qubit_hamiltonian(sys_)
    circuit = build_ansatz(sys_, spec)
    result = minimize(circuit, hamiltonian, OptimizeConfig(seed=seed))
    return result.energy, fci_energy


def cmd_scan(args) -> int:
    paths = sorted(globlib.glob(args.glob))
    if not paths:
        raise CliError(f"no files match {args.glob!r}", EXIT_INPUT)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise CliError("empty method list", EXIT_USAGE)
    for m in methods:
        if m.upper() != "FCI":
            _parse_name(m, args.direct_compiling)
    tasks = []
    for path in paths:
        tag = os.path.splitext(os.path.basename(path))[0]
        for method in methods:
            tasks.append((tag, (path, method, args.seed, args.direct_compiling, args.fci)))
    workers = int(os.environ.get("SPAVQE_WORKERS", "0")) or min(8, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_scan_one, (t for _, t in tasks)))

    buf = io.StringIO()
    writer = csv.writer(buf)
    header = ["geometry", "method", "energy"] + (["fci"] if args.fci else [])
    writer.writerow(header)
    rows = []
    for (tag, task), (energy, fci_energy) in zip(tasks, results):
        row = [tag, task[1], f"{energy:.12f}"]
        if args.fci:
            row.append(f"{fci_energy:.12f}")
        rows.append((tag, task[1], energy, fci_energy))
        writer.writerow(row)
    if args.npe:
        if not args.fci:
            raise CliError("--npe requires --fci", EXIT_USAGE)
        for method in methods:
            errs = [abs(e - f) for t, m, e, f in rows if m == method]
            npe = max(errs) - min(errs)
            writer.writerow(["NPE", method, f"{npe:.12f}"] + ([""] if args.fci else []))
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spavqe",
        description="separable-pair and k-UpCCGSD circuits: resources, compilation and optimization",
    )
    parser.add_argument("--version", action="version", version=f"spavqe {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("fcidump", help="FCIDUMP input file")
        p.add_argument("ansatz", help="ansatz name, e.g. SPA, HCB-SPA, 2-UpCCGSD")
        p.add_argument(
            "--direct-compiling",
            choices=("ladder", "canonical"),
            default="ladder",
            help="arrangement of the per-pair double excitations",
        )

    p_res = sub.add_parser("resources", help="parameter/CNOT/depth counts")
    common(p_res)
    p_res.add_argument("--level", type=int, choices=(0, 1, 2), default=2)
    p_res.add_argument("--json", action="store_true")
    p_res.set_defaults(func=cmd_resources)

    p_comp = sub.add_parser("compile", help="emit the compiled gate list")
    common(p_comp)
    p_comp.add_argument("--level", type=int, choices=(0, 1, 2), default=2)
    p_comp.add_argument("--out", default=None)
    p_comp.set_defaults(func=cmd_compile)

    p_opt = sub.add_parser("optimize", help="variational optimization run")
    common(p_opt)
    p_opt.add_argument("--oo", action="store_true", help="alternate orbital optimization")
    p_opt.add_argument("--variance", action="store_true", help="report Var(HF) and Var(opt)")
    p_opt.add_argument("--fci", action="store_true", help="include the exact ground energy")
    p_opt.add_argument("--seed", type=int, default=0)
    p_opt.add_argument("--starts", type=int, default=1)
    p_opt.add_argument("--tol-grad", type=float, default=1e-5)
    p_opt.add_argument("--max-iter", type=int, default=200)
    p_opt.add_argument("--out", default=None)
    p_opt.set_defaults(func=cmd_optimize)

    p_scan = sub.add_parser("scan", help="energies over a set of FCIDUMP files")
    p_scan.add_argument("glob", help="glob pattern over FCIDUMP files")
    p_scan.add_argument("--methods", required=True, help="comma list, e.g. SPA,SPA+GS,FCI")
    p_scan.add_argument("--fci", action="store_true", help="add an FCI reference column")
    p_scan.add_argument("--npe", action="store_true", help="append non-parallelity errors")
    p_scan.add_argument("--seed", type=int, default=0)
    p_scan.add_argument(
        "--direct-compiling", choices=("ladder", "canonical"), default="ladder"
    )
    p_scan.add_argument("--out", default=None)
    p_scan.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        if exc.code == EXIT_OPTIMIZER:
            print(json.dumps({"error": str(exc)}), file=_sys.stderr)
        return exc.code


if __name__ == "__main__":
    raise SystemExit(main())
