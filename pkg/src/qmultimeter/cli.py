"""``qmm``: reproduce the multimeter results as JSON or CSV reports.

Exit codes: 0 success, 2 invalid configuration, 3 solver did not converge,
4 optimality certificate failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .choimap import choi_to_json, mean_fidelity
from .circuit import (
    GateCircuit,
    circuit_mean_fidelity,
    fig1_circuit,
    run_batch,
    sample_outcomes,
)
from .fidelity_operator import build_r_analytic
from .information import info_from_fidelities
from .multimeter import (
    click_probability,
    discrimination_fidelities,
    effective_povm,
    expected_effective_povm,
    joint_povm,
    mean_fidelity_formula,
)
from .solver import SolverConfig, closed_form_chi, log_to_csv, solve
from .states import BlochPoint, ProgramKind, bloch_state, program_state, random_qubits

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_CONVERGENCE = 3
EXIT_CERTIFICATE = 4
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    command: str
    program_kind: str = "identical"
    n: int = 1
    tol: float = 1e-10
    max_iters: int = 10_000
    samples: int = 100_000
    seed: int = 42
    output_format: str = "json"
    output_path: str | None = None

    def __post_init__(self):
        ProgramKind.parse(self.program_kind)
        if self.program_kind == "orthogonal" and self.n != 2:
            object.__setattr__(self, "n", 2)
        if self.n < 1 or self.max_iters < 1 or self.samples < 1 or self.tol <= 0:
            raise ValueError("n, max_iters, samples and tol must be positive")
        if self.output_format not in ("json", "csv"):
            raise ValueError(f"unknown output format {self.output_format!r}")


def _matrix(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _program_psi(args) -> np.ndarray:
    return bloch_state(BlochPoint(args.theta, args.phi))


def cmd_solve(cfg: RunConfig, args) -> tuple[dict, int]:
    kind = ProgramKind.parse(cfg.program_kind)
    r = build_r_analytic(kind, cfg.n)
    solver_cfg = SolverConfig(max_iters=cfg.max_iters, convergence_tol=cfg.tol)
    res = solve(r, solver_cfg)
    closed = mean_fidelity(closed_form_chi(kind, cfg.n), r)
    cert = res.certificate
    failed = not (res.converged and cert.passed)
    results = {
        "fidelity": cert.fidelity,
        "closed_form_fidelity": closed,
        "formula_fidelity": mean_fidelity_formula(kind, cfg.n),
        "abs_difference": abs(cert.fidelity - closed),
        "iterations": res.iterations,
        "converged": res.converged,
        "certificate": cert.to_dict(),
        "failure": failed,
    }
    if args.log:
        Path(args.log).write_text(log_to_csv(res.log))
    if args.chi_out:
        Path(args.chi_out).write_text(choi_to_json(res.chi))
    code = EXIT_OK
    if not res.converged:
        code = EXIT_NO_CONVERGENCE
    elif not cert.passed:
        code = EXIT_CERTIFICATE
    return results, code


def cmd_povm(cfg: RunConfig, args) -> tuple[dict, int]:
    kind = ProgramKind.parse(cfg.program_kind)
    psi = _program_psi(args)
    joint = joint_povm(kind, cfg.n)
    eff = effective_povm(joint, program_state(psi, kind, cfg.n))
    expected = expected_effective_povm(kind, cfg.n, psi)
    f_par, f_perp = discrimination_fidelities(eff, psi)
    results = {
        "psi": [[float(z.real), float(z.imag)] for z in psi],
        "joint": {"labels": list(joint.labels), "elements": [_matrix(e) for e in joint.elements]},
        "effective": {"labels": list(eff.labels), "elements": [_matrix(e) for e in eff.elements]},
        "f_par": f_par,
        "f_perp": f_perp,
        "joint_completeness_residual": joint.completeness_error(),
        "completeness_residual": eff.completeness_error(),
        "max_deviation_from_closed_form": max(
            float(np.max(np.abs(a - b))) for a, b in zip(eff.elements, expected.elements)
        ),
    }
    w_par = np.linalg.eigvalsh(eff.elements[0])
    if kind is ProgramKind.ORTHOGONAL:
        results["identity_coefficient"] = float(w_par[0])
        results["projector_coefficient"] = float(w_par[1] - w_par[0])
    else:
        results["click_probability"] = f_perp
        results["click_probability_formula"] = click_probability(cfg.n)
    return results, EXIT_OK


def cmd_info(cfg: RunConfig, args) -> tuple[dict, int]:
    if (args.f_par is None) != (args.f_perp is None):
        raise ValueError("--f-par and --f-perp must be given together")
    if args.f_par is not None:
        f_par, f_perp = args.f_par, args.f_perp
        source = "explicit"
    else:
        kind = ProgramKind.parse(cfg.program_kind)
        psi = _program_psi(args)
        eff = effective_povm(joint_povm(kind, cfg.n), program_state(psi, kind, cfg.n))
        f_par, f_perp = discrimination_fidelities(eff, psi)
        source = f"{kind.value}:{cfg.n}"
    report = info_from_fidelities(f_par, f_perp)
    results = {"source": source, **report.to_dict()}
    return results, EXIT_OK


def cmd_circuit(cfg: RunConfig, args) -> tuple[dict, int]:
    circuit = fig1_circuit()
    if args.circuit:
        circuit = GateCircuit.from_json(Path(args.circuit).read_text())
        if circuit.num_qubits != 3:
            raise ValueError("circuit files must describe 3 wires (ancilla, signal, program)")
    signals = random_qubits(cfg.seed, args.pairs)
    programs = random_qubits(cfg.seed + 1, args.pairs)
    state = np.einsum("ks,kp->ksp", signals, programs).reshape(args.pairs, 4)
    state = np.concatenate([state, np.zeros_like(state)], axis=1)
    out = run_batch(circuit, state)
    p0 = np.sum(np.abs(out[:, :4]) ** 2, axis=1)
    # Born rule of the single-copy effective POVM with psi = program
    overlap = np.abs(np.sum(signals.conj() * programs, axis=1)) ** 2
    formula = 0.5 + 0.5 * overlap
    results = {
        "pairs": args.pairs,
        "max_deviation": float(np.max(np.abs(p0 - formula))),
        "kernel_backend": kernels.BACKEND,
    }
    if args.shots:
        exact = float(p0[0])
        count = sample_outcomes(exact, args.shots, cfg.seed)
        sigma = math.sqrt(args.shots * exact * (1 - exact))
        results["shots"] = {
            "shots": args.shots,
            "count_p0": count,
            "empirical_p0": count / args.shots,
            "exact_p0": exact,
            "sigma_counts": sigma,
            "within_5_sigma": abs(count - args.shots * exact) <= 5 * sigma + 1e-12,
        }
    if args.sweep_fidelity:
        results["sweep"] = {
            "samples": cfg.samples,
            "mean_fidelity": circuit_mean_fidelity(cfg.samples, cfg.seed),
            "expected": mean_fidelity_formula(ProgramKind.IDENTICAL, 1),
        }
    return results, EXIT_OK


def cmd_table(cfg: RunConfig, args) -> tuple[dict, int]:
    rows = []
    psi = np.array([1.0, 0.0], dtype=complex)
    for n in range(1, cfg.n + 1):
        kind = ProgramKind.IDENTICAL
        r = build_r_analytic(kind, n)
        eff = effective_povm(joint_povm(kind, n), program_state(psi, kind, n))
        f_par, f_perp = discrimination_fidelities(eff, psi)
        rows.append(
            {
                "program": "identical",
                "n": n,
                "mean_fidelity": mean_fidelity(closed_form_chi(kind, n), r),
                "formula": mean_fidelity_formula(kind, n),
                "f_par": f_par,
                "f_perp": f_perp,
                "info_bits": info_from_fidelities(f_par, f_perp).info_bits,
            }
        )
    kind = ProgramKind.ORTHOGONAL
    r = build_r_analytic(kind, 2)
    eff = effective_povm(joint_povm(kind, 2), program_state(psi, kind, 2))
    f_par, f_perp = discrimination_fidelities(eff, psi)
    rows.append(
        {
            "program": "orthogonal",
            "n": 2,
            "mean_fidelity": mean_fidelity(closed_form_chi(kind, 2), r),
            "formula": mean_fidelity_formula(kind, 2),
            "f_par": f_par,
            "f_perp": f_perp,
            "info_bits": info_from_fidelities(f_par, f_perp).info_bits,
        }
    )
    info = {
        "identical_1": info_from_fidelities(1.0, 0.5).info_bits,
        "identical_2": info_from_fidelities(1.0, 2.0 / 3.0).info_bits,
        "orthogonal": info_from_fidelities(f_par, f_perp).info_bits,
        "symmetric_3_4": info_from_fidelities(0.75, 0.75).info_bits,
    }
    return {"rows": rows, "info": info}, EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "povm": cmd_povm,
    "info": cmd_info,
    "circuit": cmd_circuit,
    "table": cmd_table,
}


def _flatten(prefix: str, value, out: list):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(value, list):
        out.append((prefix, json.dumps(value)))
    else:
        out.append((prefix, repr(value) if isinstance(value, float) else value))


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    rows = report["results"].get("rows") if report["command"] == "table" else None
    if rows:
        writer.writerow(list(rows[0].keys()))
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row.values()])
        return buf.getvalue()
    flat: list = []
    _flatten("", report, flat)
    writer.writerow(["key", "value"])
    writer.writerows(flat)
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--program", choices=["identical", "orthogonal"], default="identical")
    common.add_argument("--n", type=int, default=None)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--max-iters", type=int, default=10_000)
    common.add_argument("--samples", type=int, default=100_000)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--output", default=None, help="write the report here instead of stdout")
    common.add_argument("--theta", type=float, default=0.0, help="Bloch polar angle of psi")
    common.add_argument("--phi", type=float, default=0.0, help="Bloch azimuth of psi")

    p = argparse.ArgumentParser(prog="qmm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", parents=[common], help="numerically optimise the Choi map")
    s.add_argument("--log", help="write the iteration log as CSV")
    s.add_argument("--chi-out", help="write the optimised Choi matrix as JSON")
    sub.add_parser("povm", parents=[common], help="joint and effective POVMs")
    i = sub.add_parser("info", parents=[common], help="average information")
    i.add_argument("--f-par", type=float, default=None)
    i.add_argument("--f-perp", type=float, default=None)
    c = sub.add_parser("circuit", parents=[common], help="simulate the swap-test circuit")
    c.add_argument("--pairs", type=int, default=100)
    c.add_argument("--shots", type=int, default=0)
    c.add_argument("--sweep-fidelity", action="store_true")
    c.add_argument("--circuit", help="JSON gate list replacing the built-in circuit")
    sub.add_parser("table", parents=[common], help="fidelity and information summary table")
    return p


def _output_target(cfg: RunConfig) -> Path | None:
    if cfg.output_path:
        return Path(cfg.output_path)
    env_dir = os.environ.get("QMM_OUTPUT_DIR")
    if env_dir:
        return Path(env_dir) / f"{cfg.command}.{cfg.output_format}"
    return None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    n = args.n
    if n is None:
        n = 5 if args.command == "table" else (2 if args.program == "orthogonal" else 1)
    try:
        if args.program == "orthogonal" and args.command != "table" and n != 2:
            raise ValueError("the orthogonal program has exactly n=2 qubits")
        if args.command == "circuit" and (args.pairs < 1 or args.shots < 0):
            raise ValueError("--pairs must be positive and --shots non-negative")
        cfg = RunConfig(
            command=args.command,
            program_kind=args.program,
            n=n,
            tol=args.tol,
            max_iters=args.max_iters,
            samples=args.samples,
            seed=args.seed,
            output_format=args.format,
            output_path=args.output,
        )
        results, code = COMMANDS[args.command](cfg, args)
    except ValueError as exc:
        print(f"qmm: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    report = {
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "seed": cfg.seed,
        "ordering": "big_endian",
        "config": asdict(cfg),
        "results": results,
    }
    text = render(report, cfg.output_format)
    target = _output_target(cfg)
    if target is None:
        sys.stdout.write(text)
    else:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
