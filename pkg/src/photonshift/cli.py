"""Batch front-end: rule verification, eigensolver, Universal-NOT, checks.

Every command reads an optional JSON config, merges CLI flags on top, writes
its resolved RunConfig next to its artifacts, and emits CSV traces plus a
JSON summary.  All randomness flows from --seed through named sub-streams,
so a re-run with the same config produces byte-identical artifacts.

Exit codes: 0 success, 1 criterion failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import core, rules, variational
from .circuit import build_clements_mesh, circuit_from_json, evaluate_unitary
from .optimize import bfgs_minimize
from .variational import (
    H2_HAMILTONIAN,
    PauliHamiltonian,
    build_unot_circuit,
    build_vqe_circuit,
    derive_seed,
)


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    shots: Optional[int] = None
    out_dir: str = "out"
    threads: int = 1
    options: dict = field(default_factory=dict)


def load_config(args: argparse.Namespace) -> RunConfig:
    options = {}
    seed, shots, out_dir, threads = 0, None, "out", 1
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
        seed = doc.get("seed", seed)
        shots = doc.get("shots", shots)
        out_dir = doc.get("out_dir", out_dir)
        threads = doc.get("threads", threads)
        options = doc.get("options", {})
    if args.seed is not None:
        seed = args.seed
    if args.shots is not None:
        shots = args.shots
    if args.out is not None:
        out_dir = args.out
    if args.threads is not None:
        threads = args.threads
    return RunConfig(args.command, seed=int(seed), shots=shots,
                     out_dir=out_dir, threads=int(threads), options=options)


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(x) if isinstance(x, float) else x for x in row])


def persist_config(config: RunConfig, out: Path) -> None:
    write_json(out / "run_config.json", asdict(config))


def _trace_rows(trace, names):
    rows = []
    for rec in trace.iterations:
        rows.append([rec.iteration, rec.cost, rec.grad_norm, rec.eval_count,
                     *map(float, rec.params)])
    return ["iteration", "cost", "grad_norm", "eval_count", *names], rows


# --- verify-rules ----------------------------------------------------------

VERIFY_CASES = (
    # (label, varied parameter, output occupation, expected degree)
    ("C110_theta2", "theta1", (1, 1, 0), 2),
    ("C110_theta1", "theta0", (1, 1, 0), 1),
    ("C011_theta3", "theta2", (0, 1, 1), 1),
)
VERIFY_INPUT = (1, 0, 1)


def cmd_verify_rules(config: RunConfig, out: Path) -> int:
    circuit = build_clements_mesh(3)
    rng = np.random.default_rng(derive_seed(config.seed, "verify", "phases"))
    base = {name: float(rng.uniform(0.0, 2.0 * np.pi)) for name in circuit.parameters}

    grid = np.linspace(0.0, 2.0 * np.pi, int(config.options.get("grid_points", 81)))
    rows = []
    summary = {}
    all_expected = True
    for label, param, output, expected_k in VERIFY_CASES:
        def f(x):
            values = dict(base)
            values[param] = float(x)
            U = evaluate_unitary(circuit, values)
            return core.transition_probability(U, VERIFY_INPUT, output)

        report = rules.parameter_degree(circuit, param, VERIFY_INPUT, [output], base)
        series = rules.reconstruct_fourier(f, 2)  # two photons: degree 2 is exact

        mean_r1 = rules.integrate(f, rules.integral_rule("uniform", 1))
        mean_r2 = rules.integrate(f, rules.integral_rule("uniform", 2))
        mean_oracle = series.mean()

        d1_err = d2_err = 0.0
        for x in grid:
            d_oracle = series.derivative(x)
            d1 = rules.shift_derivative(f, x, 1)
            d2 = rules.shift_derivative(f, x, 2)
            d1_err = max(d1_err, abs(d1 - d_oracle))
            d2_err = max(d2_err, abs(d2 - d_oracle))
            rows.append([label, float(x), f(x), d_oracle, d1, d2])

        r1_ok = d1_err <= 1e-9 and abs(mean_r1 - mean_oracle) <= 1e-9
        r2_ok = d2_err <= 1e-9 and abs(mean_r2 - mean_oracle) <= 1e-9
        expected_r1_ok = expected_k == 1
        case_ok = (
            r2_ok
            and report.degree == expected_k
            and r1_ok == expected_r1_ok
            and (expected_r1_ok or d1_err > 1e-3)
        )
        all_expected = all_expected and case_ok
        summary[label] = {
            "degree": report.degree,
            "expected_degree": expected_k,
            "mean_oracle": mean_oracle,
            "mean_error_1photon": abs(mean_r1 - mean_oracle),
            "mean_error_2photon": abs(mean_r2 - mean_oracle),
            "deriv_error_1photon": d1_err,
            "deriv_error_2photon": d2_err,
            "one_photon_rule_correct": r1_ok,
            "two_photon_rule_correct": r2_ok,
            "verdict": "pass" if case_ok else "fail",
        }

    write_csv(out / "verify_rules.csv",
              ["case", "x", "f", "dfdx_oracle", "dfdx_1photon", "dfdx_2photon"],
              rows)
    write_json(out / "summary.json", summary)
    return 0 if all_expected else 1


# --- vqe -------------------------------------------------------------------

def _vqe_problem(config: RunConfig):
    opts = config.options
    coeffs = opts.get("hamiltonian")
    if coeffs is None:
        h = H2_HAMILTONIAN
    else:
        h = PauliHamiltonian(**coeffs)
    circuit, names = build_vqe_circuit()
    return circuit, names, h


def cmd_vqe(config: RunConfig, out: Path) -> int:
    circuit, names, h = _vqe_problem(config)
    opts = config.options
    n_starts = int(opts.get("n_starts", 20 if config.shots is None else 5))
    max_iter = int(opts.get("max_iter", 200 if config.shots is None else 50))
    grad_tol = float(opts.get("grad_tol", 1e-6 if config.shots is None else 1e-3))

    traces = []
    for start in range(n_starts):
        rng = np.random.default_rng(derive_seed(config.seed, "vqe", "init", start))
        x0 = rng.uniform(0.0, 2.0 * np.pi, size=len(names))
        counter = {"n": 0}

        def evaluation_seed():
            counter["n"] += 1
            return derive_seed(config.seed, "vqe", "eval", start, counter["n"])

        def cost(x):
            return variational.vqe_energy(
                circuit, dict(zip(names, x)), h,
                shots=config.shots, seed=evaluation_seed())

        def grad(x):
            return variational.vqe_gradient(
                circuit, dict(zip(names, x)), h, names,
                shots=config.shots, seed=evaluation_seed())

        traces.append(bfgs_minimize(cost, grad, x0, max_iter=max_iter,
                                    grad_tol=grad_tol))

    best_index = min(range(n_starts), key=lambda i: traces[i].f_final)
    best = traces[best_index]
    header, rows = _trace_rows(best, names)
    write_csv(out / "vqe_trace.csv", header, rows)

    oracle = h.ground_energy()
    summary = {
        "final_energy": best.f_final,
        "oracle_energy": oracle,
        "gap": best.f_final - oracle,
        "noiseless_energy_at_best": variational.vqe_energy(
            circuit, dict(zip(names, best.x_final)), h),
        "status": best.status,
        "best_start": best_index,
        "n_starts": n_starts,
        "shots": config.shots,
        "cost_evaluations": best.cost_evals,
        "gradient_evaluations": best.grad_evals,
        "per_start_final": [t.f_final for t in traces],
        "best_parameters": dict(zip(names, map(float, best.x_final))),
    }
    write_json(out / "summary.json", summary)
    return 0


# --- unot ------------------------------------------------------------------

def cmd_unot(config: RunConfig, out: Path) -> int:
    circuit = build_unot_circuit()
    opts = config.options
    n_starts = int(opts.get("n_starts", 5))
    max_iter = int(opts.get("max_iter", 200 if config.shots is None else 50))
    grad_tol = float(opts.get("grad_tol", 1e-8 if config.shots is None else 1e-3))
    n_states = int(opts.get("n_states", 1000))

    traces = []
    for start in range(n_starts):
        rng = np.random.default_rng(derive_seed(config.seed, "unot", "init", start))
        x0 = rng.uniform(0.0, 2.0 * np.pi, size=len(variational.UNOT_VARIATIONAL))
        counter = {"n": 0}

        def evaluation_seed():
            counter["n"] += 1
            return derive_seed(config.seed, "unot", "eval", start, counter["n"])

        def cost(x):
            return variational.unot_cost(circuit, x, shots=config.shots,
                                         seed=evaluation_seed())

        def grad(x):
            return variational.unot_gradient(circuit, x, shots=config.shots,
                                             seed=evaluation_seed())

        traces.append(bfgs_minimize(cost, grad, x0, max_iter=max_iter,
                                    grad_tol=grad_tol))

    best_index = min(range(n_starts), key=lambda i: traces[i].f_final)
    best = traces[best_index]
    header, rows = _trace_rows(best, list(variational.UNOT_VARIATIONAL))
    write_csv(out / "unot_trace.csv", header, rows)

    mean, stderr, histogram = variational.unot_fidelity_test(
        circuit, best.x_final, n_states=n_states,
        seed=derive_seed(config.seed, "unot", "fidelity"))
    write_csv(out / "fidelity_histogram.csv", ["bin_left", "count"], histogram)

    summary = {
        "final_cost": best.f_final,
        "target_cost": -2.0 / 3.0,
        "mean_fidelity": mean,
        "fidelity_stderr": stderr,
        "n_states": n_states,
        "status": best.status,
        "best_start": best_index,
        "n_starts": n_starts,
        "shots": config.shots,
        "best_parameters": dict(zip(variational.UNOT_VARIATIONAL,
                                    map(float, best.x_final))),
    }
    write_json(out / "summary.json", summary)
    return 0


# --- gradient-check --------------------------------------------------------

def cmd_gradient_check(config: RunConfig, out: Path) -> int:
    opts = config.options
    problem = opts.get("problem", "vqe")
    n_points = int(opts.get("n_points", 10))
    wrong_degree = bool(opts.get("wrong_degree", False))
    h_fd = 1e-6

    if problem == "vqe":
        circuit, names, h = _vqe_problem(config)

        def observable(x):
            return variational.vqe_energy(circuit, dict(zip(names, x)), h)

        def shift_grad(x, degrade):
            if not degrade:
                return variational.vqe_gradient(circuit, dict(zip(names, x)), h, names)
            degrees = {n: 1 for n in names}  # true degree is 2
            return rules.gradient(
                circuit,
                lambda values: variational.vqe_energy(circuit, values, h),
                names, degrees, dict(zip(names, x)))

    elif problem == "unot":
        circuit = build_unot_circuit()
        names = list(variational.UNOT_VARIATIONAL)

        def observable(x):
            return variational.unot_cost(circuit, x)

        def shift_grad(x, degrade):
            if not degrade:
                return variational.unot_gradient(circuit, x)
            # no degree below 1 exists; sabotage by halving the shift instead
            g = variational.unot_gradient(circuit, x)
            return 0.5 * g

    elif problem == "circuit":
        path = opts["circuit_file"]
        circuit = circuit_from_json(Path(path).read_text())
        names = opts.get("parameters") or circuit.parameter_names()
        input_occ = tuple(opts["input"])
        output_occ = tuple(opts["output"])

        def observable(x):
            U = evaluate_unitary(circuit, dict(zip(names, x)))
            return core.transition_probability(U, input_occ, output_occ)

        def shift_grad(x, degrade):
            values = dict(zip(names, x))
            degrees = {}
            for name in names:
                report = rules.parameter_degree(circuit, name, input_occ,
                                                [output_occ], values)
                degrees[name] = max(report.degree - (1 if degrade else 0), 1) \
                    if report.degree > 0 else 0
            return rules.gradient(
                circuit,
                lambda vals: core.transition_probability(
                    evaluate_unitary(circuit, vals), input_occ, output_occ),
                names, degrees, values)
    else:
        raise ValueError(f"unknown problem {problem!r}")

    rng = np.random.default_rng(derive_seed(config.seed, "gradient-check"))
    rows = []
    max_err = 0.0
    for point in range(n_points):
        x = rng.uniform(0.0, 2.0 * np.pi, size=len(names))
        g = np.asarray(shift_grad(x, wrong_degree))
        fd = np.empty(len(names))
        for i in range(len(names)):
            xp, xm = x.copy(), x.copy()
            xp[i] += h_fd
            xm[i] -= h_fd
            fd[i] = (observable(xp) - observable(xm)) / (2.0 * h_fd)
        err = float(np.abs(g - fd).max())
        max_err = max(max_err, err)
        rows.append([point, err])

    write_csv(out / "gradient_check.csv", ["point", "max_abs_error"], rows)
    passed = max_err <= 1e-6
    write_json(out / "summary.json", {
        "problem": problem,
        "wrong_degree": wrong_degree,
        "n_points": n_points,
        "max_abs_error": max_err,
        "pass": passed,
    })
    return 0 if passed else 1


COMMANDS = {
    "verify-rules": cmd_verify_rules,
    "vqe": cmd_vqe,
    "unot": cmd_unot,
    "gradient-check": cmd_gradient_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonshift",
        description="Linear-optics parameter shift rule simulator",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--shots", type=int, default=None)
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--threads", type=int, default=None,
                        help="evaluation concurrency cap (results are "
                             "schedule-independent)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = load_config(args)
    except SystemExit:
        return 2
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    persist_config(config, out)
    return COMMANDS[config.command](config, out)


if __name__ == "__main__":
    sys.exit(main())
