"""Command-line front end: catalog listing, experiment grids, profiles, and
per-problem differencing diagnostics.

Experiment specs are flat ``key = value`` text files (comma-separated lists,
``#`` comments) so a run's provenance diffs cleanly.  Grid output is a
``runs.csv`` in the bench schema; profiles emit a CSV and an SVG figure side
by side.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bench, fdiff, lbfgs, leastsq, lipschitz, problems
from .noise import NoiseModel, NoisyOracle

OUTPUT_ROOT_ENV = "FDOPT_OUTPUT_ROOT"

LBFGS_SOLVERS = ("lbfgs-fd", "lbfgs-cd")
LM_SOLVERS = ("lm-fd",)
ALL_SOLVERS = LBFGS_SOLVERS + LM_SOLVERS


class SpecError(ValueError):
    """Bad experiment spec or command usage; maps to exit status 2."""


@dataclass
class ExperimentSpec:
    problems: list = field(default_factory=lambda: ["all"])
    solvers: list = field(default_factory=lambda: ["lbfgs-fd"])
    sigma_f: list = field(default_factory=lambda: [0.0])
    seeds: list = field(default_factory=lambda: [0])
    budget_multiplier: float = 500.0
    lipschitz: str = "mw_component"
    lm_policy: str = leastsq.INITIAL_ONLY
    output: str = "."


def _parse_list(raw):
    return [tok.strip() for tok in raw.split(",") if tok.strip()]


def parse_spec(path) -> ExperimentSpec:
    spec = ExperimentSpec()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read spec file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        try:
            if key == "problems":
                spec.problems = _parse_list(raw)
            elif key == "solvers":
                spec.solvers = _parse_list(raw)
            elif key == "sigma_f":
                spec.sigma_f = [float(tok) for tok in _parse_list(raw)]
            elif key == "seeds":
                spec.seeds = [int(tok) for tok in _parse_list(raw)]
            elif key == "budget_multiplier":
                spec.budget_multiplier = float(raw)
            elif key == "lipschitz":
                spec.lipschitz = raw
            elif key == "lm_policy":
                spec.lm_policy = raw
            elif key == "output":
                spec.output = raw
            else:
                raise SpecError(f"{path}:{lineno}: unknown field {key!r}")
        except ValueError as exc:
            if isinstance(exc, SpecError):
                raise
            raise SpecError(f"{path}:{lineno}: bad value for field {key!r}: {exc}")
    _validate_spec(spec)
    return spec


def _validate_spec(spec):
    if spec.budget_multiplier < 1.0:
        raise SpecError("field 'budget_multiplier' must be at least 1")
    for solver in spec.solvers:
        if solver not in ALL_SOLVERS:
            raise SpecError(f"field 'solvers': unknown solver {solver!r}")
    for sigma in spec.sigma_f:
        if sigma < 0.0:
            raise SpecError("field 'sigma_f': noise levels must be nonnegative")
    if not spec.problems:
        raise SpecError("field 'problems' must not be empty")
    if spec.problems != ["all"]:
        kinds_used = set()
        for solver in spec.solvers:
            kinds_used.add("smooth" if solver in LBFGS_SOLVERS else "residual")
        for name in spec.problems:
            if not any(problems.find(name, kind) for kind in kinds_used):
                raise SpecError(f"field 'problems': unknown problem {name!r}")


def _cells(spec):
    """Grid cells in deterministic spec order, skipping incompatible
    solver/problem pairings."""
    cells = []
    for solver in spec.solvers:
        kind = "smooth" if solver in LBFGS_SOLVERS else "residual"
        if spec.problems == ["all"]:
            names = [e.problem.name for e in problems.catalog() if e.kind == kind]
        else:
            names = [n for n in spec.problems if problems.find(n, kind)]
        for name in names:
            for sigma in spec.sigma_f:
                for seed in spec.seeds:
                    cells.append((solver, name, float(sigma), int(seed),
                                  spec.budget_multiplier, spec.lipschitz,
                                  spec.lm_policy))
    return cells


def _run_cell(cell):
    solver, name, sigma, seed, mult, lip_mode, lm_policy = cell
    kind = "smooth" if solver in LBFGS_SOLVERS else "residual"
    entry = problems.find(name, kind)
    problem = entry.problem
    model = NoiseModel("uniform" if sigma > 0.0 else "none", sigma, seed)
    oracle = NoisyOracle(problem, model)
    budget = mult * problem.n
    if solver in LBFGS_SOLVERS:
        scheme = fdiff.FORWARD if solver == "lbfgs-fd" else fdiff.CENTRAL
        config = lbfgs.LbfgsConfig(scheme=scheme, sigma_f=sigma,
                                   lipschitz_mode=lip_mode, max_evals=budget)
        result = lbfgs.minimize(oracle, problem.x0, config)
    else:
        config = leastsq.LmConfig(sigma_f=sigma, lipschitz_policy=lm_policy,
                                  max_evals=budget)
        result = leastsq.lm_minimize(oracle, problem.x0, config)
    return bench.record_from_result(solver, name, sigma, seed, result)


def _output_dir(spec_output, force):
    root = Path(os.environ.get(OUTPUT_ROOT_ENV, "."))
    out = root / spec_output
    if (out / "runs.csv").exists() and not force:
        k = 1
        while (out.parent / f"{out.name}-{k}" / "runs.csv").exists():
            k += 1
        out = out.parent / f"{out.name}-{k}"
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args) -> int:
    spec = parse_spec(args.spec)
    cells = _cells(spec)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(_run_cell, cells))
    else:
        records = [_run_cell(cell) for cell in cells]
    out = _output_dir(spec.output, args.force)
    path = out / "runs.csv"
    bench.emit_runs_csv(records, path)
    print(f"wrote {path} ({len(records)} runs)")
    return 0


def _phi_star_map(records):
    stars = {}
    for rec in records:
        kind = "smooth" if rec.solver_id in LBFGS_SOLVERS else "residual"
        entry = problems.find(rec.problem_id, kind)
        if entry is None or entry.problem.phi_star is None:
            raise SpecError(f"no optimal value known for problem "
                            f"{rec.problem_id!r} ({kind})")
        stars[rec.problem_id] = entry.problem.phi_star
    return stars


def cmd_profile(args) -> int:
    for path in (args.runs_a, args.runs_b):
        if not Path(path).exists():
            raise SpecError(f"input file {path} does not exist")
    records_a = bench.load_runs_csv(args.runs_a)
    records_b = bench.load_runs_csv(args.runs_b)
    stars = _phi_star_map(records_a + records_b)
    try:
        if args.mode == "evals":
            preds = {pid: (lambda row, s=star: bench.gap_target(row[2], s, args.tau))
                     for pid, star in stars.items()}
            profile = bench.log_ratio_profile(records_a, records_b, preds)
        else:
            profile = bench.accuracy_profile(records_a, records_b, stars)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bench.emit_profile_csv(profile, out / "profile.csv")
    bench.emit_profile_svg(profile, out / "profile.svg",
                           title=f"{args.mode} log-ratio")
    print(f"wrote {out / 'profile.csv'} and {out / 'profile.svg'}")
    return 0


def cmd_probe(args) -> int:
    entry = problems.find(args.problem, "smooth")
    if entry is None:
        raise SpecError(f"unknown problem {args.problem!r}")
    problem = entry.problem
    x = problem.x0.copy()
    if args.x is not None:
        vals = [float(tok) for tok in _parse_list(args.x)]
        if len(vals) != problem.n:
            raise SpecError(f"--x needs {problem.n} components")
        x = np.array(vals)
    sigma = args.sigma
    model = NoiseModel("uniform" if sigma > 0.0 else "none", sigma, args.seed)
    oracle = NoisyOracle(problem, model)
    n = problem.n
    print(f"problem {problem.name}  n={n}  sigma_f={sigma:g}  seed={args.seed}")
    print(f"f(x) = {problem.value(x):.6e}")

    g_true = problem.gradient(x) if problem.gradient is not None else None
    diag = None
    if problem.hessian_quadform is not None:
        diag = np.array([problem.hessian_quadform(x, _unit_vec(n, i))
                         for i in range(n)])

    if sigma > 0.0:
        est = lipschitz.estimate_component_lipschitz(oracle, x, sigma)
        h_mw = np.array([fdiff.optimal_interval(sigma, L, fdiff.FORWARD)
                         for L in est.values])
        sig_coord = [fdiff.gradient_noise_level(sigma, L, fdiff.FORWARD)
                     for L in est.values]
        print(f"predicted gradient noise sigma_g = "
              f"{fdiff.full_gradient_noise_level(sig_coord):.6e}")
        header = "coord  x_i           L_probe      floored  h_i"
        if diag is not None:
            header += "          |d2f/dx2|    h_from_d2"
        if g_true is not None:
            header += "     fd_grad       analytic"
        print(header)
        g_fd, _ = fdiff.fd_gradient(oracle, x, fdiff.FORWARD,
                                    fdiff.noise_optimal_rule(sigma, est.values))
        for i in range(n):
            row = (f"{i:5d}  {x[i]:+.4e}  {est.values[i]:.5e}  "
                   f"{'yes' if est.floor_applied[i] else 'no ':3s}      "
                   f"{h_mw[i]:.5e}")
            if diag is not None:
                curv = abs(diag[i])
                h_d2 = (fdiff.optimal_interval(sigma, curv, fdiff.FORWARD)
                        if curv > 0.0 else float("inf"))
                row += f"  {curv:.5e}  {h_d2:.5e}"
            if g_true is not None:
                row += f"  {g_fd[i]:+.4e}  {g_true[i]:+.4e}"
            print(row)
        if diag is not None and g_true is not None:
            print("forward quotient using the pointwise-curvature interval:")
            for i in range(n):
                curv = abs(diag[i])
                if curv <= 0.0:
                    continue
                h_d2 = fdiff.optimal_interval(sigma, curv, fdiff.FORWARD)
                quot = fdiff.fd_directional(oracle, x, _unit_vec(n, i),
                                            fdiff.FORWARD, h_d2)
                print(f"  coord {i}: h={h_d2:.5e}  quotient={quot:+.5e}  "
                      f"analytic={g_true[i]:+.5e}")
    else:
        rule = fdiff.machine_eps_rule()
        print("machine-precision intervals:")
        g_fd, _ = fdiff.fd_gradient(oracle, x, fdiff.FORWARD, rule)
        for i in range(n):
            h = fdiff.interval(x[i], rule, fdiff.FORWARD, i)
            row = f"{i:5d}  x_i={x[i]:+.4e}  h_i={h:.5e}"
            if g_true is not None:
                row += (f"  fd={g_fd[i]:+.6e}  analytic={g_true[i]:+.6e}  "
                        f"err={abs(g_fd[i] - g_true[i]):.2e}")
            print(row)
    return 0


def _unit_vec(n, i):
    e = np.zeros(n)
    e[i] = 1.0
    return e


def cmd_problems(args) -> int:
    if args.what != "list":
        raise SpecError(f"unknown problems subcommand {args.what!r}")
    print("kind,name,n,m,x0,phi_star")
    for entry in problems.catalog():
        p = entry.problem
        m = p.m if entry.kind == "residual" else ""
        x0 = ";".join(repr(float(v)) for v in p.x0)
        star = "" if p.phi_star is None else repr(float(p.phi_star))
        print(f"{entry.kind},{p.name},{p.n},{m},{x0},{star}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdopt",
        description="difference-gradient optimization experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_problems = sub.add_parser("problems", help="inspect the problem catalog")
    p_problems.add_argument("what", choices=["list"])
    p_problems.set_defaults(func=cmd_problems)

    p_run = sub.add_parser("run", help="execute an experiment grid")
    p_run.add_argument("spec", help="path to a flat key=value spec file")
    p_run.add_argument("--jobs", type=int, default=1,
                       help="parallel worker processes")
    p_run.add_argument("--force", action="store_true",
                       help="overwrite an existing runs.csv")
    p_run.set_defaults(func=cmd_run)

    p_prof = sub.add_parser("profile", help="compare two runs.csv files")
    p_prof.add_argument("runs_a")
    p_prof.add_argument("runs_b")
    p_prof.add_argument("--mode", choices=["evals", "accuracy"],
                        default="evals")
    p_prof.add_argument("--tau", type=float, default=1e-6)
    p_prof.add_argument("--out", default=".")
    p_prof.set_defaults(func=cmd_profile)

    p_probe = sub.add_parser("probe",
                             help="differencing diagnostics for one problem")
    p_probe.add_argument("problem")
    p_probe.add_argument("--sigma", type=float, default=0.0)
    p_probe.add_argument("--seed", type=int, default=0)
    p_probe.add_argument("--x", help="comma-separated point overriding x0")
    p_probe.set_defaults(func=cmd_probe)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - surfaced as exit status 1
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
