"""Command-line front end: solve, residual, rom, reproduce, validate."""
from __future__ import annotations

import argparse
import csv
import random
import sys
from pathlib import Path

import numpy as np

from . import bench
from .assembly import assemble_operators
from .basis import generate_basis
from .config import (
    ConfigError,
    build_domain,
    build_gain,
    build_problem,
    build_sim_config,
    build_solver_options,
    load_config,
)
from .newton import solve_invariance
from .persist import problem_fingerprint, read_coefficients, write_coefficients
from .problems import check_assumptions, linearize
from .quadrature import BoxDomain
from .residuals import residual_norm
from .rom import build_rom
from .simulate import simulate_fom, simulate_rom, steady_state_rms

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_CONFIG_ERROR = 2


def _say(args, *msg):
    if not args.quiet:
        print(*msg)


def _fingerprint(cfg) -> str:
    prob = cfg["problem"]
    return problem_fingerprint(prob["name"], prob.get("params", {}) or {})


def _solve_from_config(cfg, args):
    problem = build_problem(cfg)
    domain = build_domain(cfg)
    basis = generate_basis(problem.generator.d, cfg["degree"])
    ops = assemble_operators(problem, basis, domain, q=cfg.get("quadrature"))
    solution = solve_invariance(problem, ops, build_solver_options(cfg))
    return problem, domain, basis, solution


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    problem, domain, basis, solution = _solve_from_config(cfg, args)
    coeff_path = out / "coefficients.txt"
    write_coefficients(
        coeff_path, solution.c, n=problem.system.n, d=basis.d, M=basis.M,
        domain=domain, fingerprint=_fingerprint(cfg),
    )
    log_path = out / "convergence.csv"
    with open(log_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "F_l1"])
        for i, r in enumerate(solution.residual_history):
            writer.writerow([i, f"{r:.17g}"])
    _say(args, f"wrote {coeff_path} and {log_path}")
    if not solution.converged:
        _say(args, f"did NOT converge within {solution.iterations} iterations; "
                   f"final |F|_1 = {solution.residual_history[-1]:.3e}")
        return EXIT_NOT_CONVERGED
    _say(args, f"converged in {solution.iterations} iterations "
               f"(backend {solution.backend_used}); "
               f"final |F|_1 = {solution.residual_history[-1]:.3e}")
    return EXIT_OK


def cmd_residual(args) -> int:
    cfg = load_config(args.config)
    data = read_coefficients(args.coefficients)
    if data["fingerprint"] and data["fingerprint"] != _fingerprint(cfg):
        print("coefficient file fingerprint does not match the configured problem",
              file=sys.stderr)
        return EXIT_CONFIG_ERROR
    problem = build_problem(cfg)
    basis = generate_basis(data["d"], data["M"])
    W = BoxDomain.cube(args.subdomain, d=data["d"])
    report = residual_norm(problem, basis, data["c"], W=W, q=args.quadrature,
                           solve_domain=data["domain"])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "residual.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["domain", "M", "n", "weighted_norm"])
        writer.writerow([
            f"[{data['domain'].lo[0]:g},{data['domain'].hi[0]:g}]^{data['d']}",
            data["M"], data["n"], f"{report.weighted_norm:.17g}",
        ])
    _say(args, f"weighted residual norm over W=[-{args.subdomain:g},{args.subdomain:g}]^"
               f"{data['d']}: {report.weighted_norm:.6e}")
    for i, v in enumerate(report.per_component_norms):
        _say(args, f"  component {i + 1}: {v:.6e}")
    _say(args, f"wrote {path}")
    return EXIT_OK


def cmd_rom(args) -> int:
    cfg = load_config(args.config)
    problem, domain, basis, solution = _solve_from_config(cfg, args)
    if not solution.converged:
        _say(args, "invariance solve did not converge; cannot build the reduced model")
        return EXIT_NOT_CONVERGED
    gain = build_gain(cfg, problem)
    rom = build_rom(problem, solution, gain)
    sim, omega0, r0, x0 = build_sim_config(cfg)
    if x0 is None:
        x0 = np.zeros(problem.system.n)
    fom_traj = simulate_fom(problem, omega0, x0, sim)
    rom_traj = simulate_rom(rom, problem.generator, omega0, r0, sim)
    metrics = steady_state_rms(fom_traj, rom_traj, sim)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fom_traj.to_csv(out / "fom_output.csv", label="y")
    rom_traj.to_csv(out / "rom_output.csv", label="yr")
    grid = np.linspace(max(fom_traj.times[0], rom_traj.times[0]),
                       min(fom_traj.times[-1], rom_traj.times[-1]), 2000)
    err = np.abs(np.interp(grid, fom_traj.times, fom_traj.outputs[:, 0])
                 - np.interp(grid, rom_traj.times, rom_traj.outputs[:, 0]))
    np.savetxt(out / "output_error.csv", np.column_stack([grid, err]),
               delimiter=",", header="t,abs_error", comments="", fmt="%.17g")
    with open(out / "rms_summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rms_error", "amplitude", "relative_rms"])
        writer.writerow([f"{metrics['rms_error']:.17g}",
                         f"{metrics['amplitude']:.17g}",
                         f"{metrics['relative_rms']:.17g}"])
    _say(args, f"relative steady-state RMS: {metrics['relative_rms']:.6e}")
    _say(args, f"wrote trajectories and summary to {out}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    results = bench.reproduce_table(args.table, scale=args.scale, threads=args.threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{args.table}.csv"
    bench.write_results_csv(path, results)
    all_pass = all(r.passed for r in results)
    for r in results:
        val = "not-converged" if r.value is None else f"{r.value:.4e}"
        ref = "-" if r.reference is None else f"{r.reference:.4e}"
        _say(args, f"  domain [-{r.half_width:g},{r.half_width:g}]^2  M={r.M}  n={r.n}  "
                   f"value={val}  reference={ref}  "
                   f"{'pass' if r.passed else 'FAIL'}")
    _say(args, f"wrote {path}")
    return EXIT_OK if all_pass else EXIT_NOT_CONVERGED


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    S, L, A_sys, _ = linearize(problem)
    report = check_assumptions(problem)
    det = report["details"]
    _say(args, "generator eigenvalues:", np.round(det["generator_eigenvalues"], 6))
    _say(args, "system eigenvalues (extremes):",
         np.round(np.sort_complex(det["system_eigenvalues"])[[0, -1]], 6))
    _say(args, f"neutral-stability necessary condition: "
               f"{'pass' if report['A1_necessary'] else 'FAIL'}")
    if not report["A1_necessary"]:
        _say(args, "  note: the necessary condition checks the linearization only; "
                   "generators persistent on a limit cycle rather than around the "
                   "equilibrium (e.g. Van der Pol) fail it by construction")
    _say(args, f"asymptotic stability of the system linearization: "
               f"{'pass' if report['A2'] else 'FAIL'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmrom",
        description="Galerkin solver for invariance PDEs and moment-matching "
                    "reduced-order models",
    )
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for grids")
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized runs")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve the invariance equation")
    p_solve.add_argument("--config", required=True)
    p_solve.set_defaults(func=cmd_solve)

    p_res = sub.add_parser("residual", help="evaluate residual norms of a coefficient file")
    p_res.add_argument("--config", required=True)
    p_res.add_argument("--coefficients", required=True)
    p_res.add_argument("--subdomain", type=float, default=0.7,
                       help="half-width of the evaluation box W")
    p_res.add_argument("--quadrature", type=int, default=20)
    p_res.set_defaults(func=cmd_residual)

    p_rom = sub.add_parser("rom", help="build and simulate the reduced-order model")
    p_rom.add_argument("--config", required=True)
    p_rom.set_defaults(func=cmd_rom)

    p_rep = sub.add_parser("reproduce", help="reproduce a published benchmark table")
    p_rep.add_argument("table", choices=bench.TABLE_IDS)
    p_rep.add_argument("--scale", choices=("desk", "full"), default="desk")
    p_rep.set_defaults(func=cmd_reproduce)

    p_val = sub.add_parser("validate", help="report stability assumption checks")
    p_val.add_argument("--config", required=True)
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is not None:
        random.seed(args.seed)
        np.random.seed(args.seed)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
