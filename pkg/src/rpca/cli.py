"""Command-line interface: solve, synth, phase, and bench subcommands.

Exit codes: 0 on success (solve: converged), 1 on usage or configuration
errors (message on stderr), 2 when solve stops at the iteration cap without
reaching the tolerance.  All JSON outputs carry ``schema_version`` 1, the
solver id, the full parameter set, the seed, and per-iteration error and
threshold arrays, so every reported number can be re-derived from artifacts.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from time import perf_counter

from .experiments import (
    SOLVER_IDS,
    PhaseConfig,
    paper_phase_config,
    run_phase_experiment,
    run_runtime_experiment,
)
from .matio import MatrixIOError, read_matrix, write_matrix
from .metrics import incoherence_of
from .solver import RpcaParams, accaltproj_solve, altproj_solve
from .synthetic import RNG_ID, SyntheticSpec, generate

__all__ = ["CliError", "build_parser", "main", "run"]

_PAPER_BENCH_SIZES = (1000, 2500, 5000, 10000, 15000)

_GRID_KEYS = {"n", "m", "rank", "alphas", "cs", "trials", "seed", "tol", "max_iter", "gamma", "solvers"}
_REQUIRED_GRID_KEYS = {"n", "rank", "alphas", "cs", "trials"}


class CliError(Exception):
    """Usage or configuration problem; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _write_json(path, payload):
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _output_dir(args, default):
    out = Path(args.output_dir) if args.output_dir else Path(default)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _params_dict(params):
    return {
        "rank": params.rank,
        "mu": params.mu,
        "beta": params.beta,
        "beta_init": params.beta_init,
        "gamma": params.gamma,
        "epsilon": params.epsilon,
        "max_iter": params.max_iter,
        "trim_enabled": params.trim_enabled,
    }


def _cmd_solve(args):
    d = read_matrix(args.input)
    m, n = d.shape
    if not 1 <= args.rank <= min(m, n):
        raise CliError(f"--rank {args.rank} out of range for a {m} x {n} input")
    if args.mu is None:
        mu = incoherence_of(d, args.rank)
        print(
            f"warning: --mu not given; using {mu:.6g}, measured on the rank-{args.rank} "
            "truncation of the input",
            file=sys.stderr,
        )
    else:
        mu = args.mu
    overrides = {}
    for name in ("beta", "beta_init", "gamma"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    params = RpcaParams.defaults(
        (m, n),
        args.rank,
        mu,
        epsilon=args.eps,
        max_iter=args.max_iter,
        trim_enabled=not args.no_trim,
        **overrides,
    )
    solve = accaltproj_solve if args.solver == "accaltproj" else altproj_solve

    t0 = perf_counter()
    solution = solve(d, params)
    total_seconds = perf_counter() - t0

    out_dir = _output_dir(args, Path(args.input).parent)
    fmt = "csv" if Path(args.input).suffix.lower() == ".csv" else "bin"
    write_matrix(solution.low_rank.matrix(), out_dir / f"L.{fmt}")
    write_matrix(solution.sparse, out_dir / f"S.{fmt}")
    _write_json(
        out_dir / "trace.json",
        {
            "schema_version": 1,
            "kind": "solve",
            "solver": args.solver,
            "seed": 0,  # the truncated-SVD fallback seed; solve is otherwise deterministic
            "params": _params_dict(params),
            "input": {"path": str(args.input), "rows": m, "cols": n},
            "converged": solution.converged,
            "iterations": solution.iterations,
            "final_err": solution.final_err,
            "trace": solution.trace.as_dict(),
            "total_seconds": total_seconds,
        },
    )
    if not solution.converged:
        print(
            f"did not converge within {params.max_iter} iterations "
            f"(final err {solution.final_err:.3e})",
            file=sys.stderr,
        )
        return 2
    return 0


def _cmd_synth(args):
    spec = SyntheticSpec(
        m=args.m if args.m is not None else args.n,
        n=args.n,
        rank=args.rank,
        alpha=args.alpha,
        amplitude=args.c,
        seed=args.seed,
    )
    problem = generate(spec)
    out_dir = _output_dir(args, ".")
    names = {key: f"{key}.{args.format}" for key in ("D", "L", "S")}
    write_matrix(problem.data, out_dir / names["D"])
    write_matrix(problem.low_rank, out_dir / names["L"])
    write_matrix(problem.sparse, out_dir / names["S"])
    _write_json(
        out_dir / "metadata.json",
        {
            "schema_version": 1,
            "kind": "synth",
            "seed": spec.seed,
            "rng": RNG_ID,
            "spec": {
                "m": spec.m,
                "n": spec.n,
                "rank": spec.rank,
                "alpha": spec.alpha,
                "amplitude": spec.amplitude,
                "seed": spec.seed,
            },
            "support_size": int(problem.support.size),
            "mu_true": problem.mu_true,
            "kappa_true": problem.kappa_true,
            "files": {"data": names["D"], "low_rank": names["L"], "sparse": names["S"]},
        },
    )
    return 0


def _load_phase_config(path):
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(f"cannot read grid file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise CliError(f"{path}: grid file must hold a JSON object")
    unknown = sorted(set(raw) - _GRID_KEYS)
    if unknown:
        raise CliError(f"{path}: unknown keys {unknown}")
    missing = sorted(_REQUIRED_GRID_KEYS - set(raw))
    if missing:
        raise CliError(f"{path}: missing keys {missing}")
    try:
        return PhaseConfig(
            alphas=tuple(float(a) for a in raw["alphas"]),
            amplitudes=tuple(float(c) for c in raw["cs"]),
            trials=int(raw["trials"]),
            n=int(raw["n"]),
            m=int(raw["m"]) if "m" in raw else None,
            rank=int(raw["rank"]),
            master_seed=int(raw.get("seed", 0)),
            tol=float(raw.get("tol", 1e-6)),
            max_iter=int(raw.get("max_iter", 100)),
            gamma=float(raw["gamma"]) if raw.get("gamma") is not None else None,
            solvers=tuple(raw.get("solvers", SOLVER_IDS)),
        )
    except (TypeError, ValueError) as exc:
        raise CliError(f"{path}: {exc}") from None


def _write_report_csv(path, report):
    columns = [
        "alpha",
        "amplitude",
        "solver",
        "seed",
        "m",
        "n",
        "rank",
        "iterations",
        "final_err",
        "converged",
        "success",
        "wall_seconds",
    ]
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for rec in report.records:
            writer.writerow([getattr(rec, column) for column in columns])


def _cmd_phase(args):
    if args.paper:
        config = paper_phase_config(master_seed=args.seed)
    elif args.grid:
        config = _load_phase_config(args.grid)
    else:
        raise CliError("either --grid FILE or --paper is required")
    report = run_phase_experiment(config)
    out_dir = _output_dir(args, ".")
    payload = report.as_dict()
    payload["seed"] = config.master_seed
    _write_json(out_dir / "report.json", payload)
    _write_report_csv(out_dir / "report.csv", report)
    return 0


def _parse_sizes(text):
    try:
        sizes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise CliError(f"--sizes must be comma-separated integers, got {text!r}") from None
    if not sizes or any(size < 2 for size in sizes):
        raise CliError(f"--sizes must list integers >= 2, got {text!r}")
    return sizes


def _cmd_bench(args):
    sizes = list(_PAPER_BENCH_SIZES) if args.paper else _parse_sizes(args.sizes)
    report = run_runtime_experiment(sizes, rank=args.rank, master_seed=args.seed)
    out_dir = _output_dir(args, ".")
    payload = report.as_dict()
    payload["seed"] = args.seed
    _write_json(out_dir / "timings.json", payload)
    return 0


def build_parser():
    parser = _Parser(prog="rpca", description="Low-rank + sparse matrix decomposition toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = sub.add_parser("solve", help="decompose a matrix file into L and S")
    solve.add_argument("--input", required=True, help="matrix file (.bin or .csv)")
    solve.add_argument("--rank", required=True, type=int, help="target rank of L")
    solve.add_argument("--mu", type=float, help="incoherence level (measured on the input if omitted)")
    solve.add_argument("--beta", type=float, help="threshold scale (default 1.1*mu*r/(2*sqrt(mn)))")
    solve.add_argument("--beta-init", type=float, help="initial threshold scale (default 2*beta)")
    solve.add_argument("--gamma", type=float, help="threshold decay rate (default 0.5)")
    solve.add_argument("--eps", type=float, default=1e-6, help="relative-residual stopping tolerance")
    solve.add_argument("--max-iter", type=int, default=100, help="iteration cap")
    solve.add_argument("--no-trim", action="store_true", help="skip the incoherence trim step")
    solve.add_argument("--solver", choices=("accaltproj", "altproj"), default="accaltproj")
    solve.add_argument("--output-dir", help="where to write L, S and trace.json (default: input directory)")
    solve.set_defaults(func=_cmd_solve)

    synth = sub.add_parser("synth", help="generate a seeded synthetic problem")
    synth.add_argument("--n", required=True, type=int, help="columns")
    synth.add_argument("--m", type=int, help="rows (default: n)")
    synth.add_argument("--rank", required=True, type=int)
    synth.add_argument("--alpha", required=True, type=float, help="corrupted fraction in [0, 1)")
    synth.add_argument("--c", required=True, type=float, help="corruption amplitude factor")
    synth.add_argument("--seed", required=True, type=int)
    synth.add_argument("--format", choices=("bin", "csv"), default="bin")
    synth.add_argument("--output-dir", help="default: current directory")
    synth.set_defaults(func=_cmd_synth)

    phase = sub.add_parser("phase", help="success-rate grid over (alpha, c)")
    phase.add_argument("--grid", help="JSON grid file")
    phase.add_argument("--paper", action="store_true", help="run the full-scale published grid (slow)")
    phase.add_argument("--seed", type=int, default=0, help="master seed for --paper")
    phase.add_argument("--output-dir", help="default: current directory")
    phase.set_defaults(func=_cmd_phase)

    bench = sub.add_parser("bench", help="runtime comparison across sizes")
    bench.add_argument("--sizes", default="200,500,1000", help="comma-separated sizes")
    bench.add_argument("--rank", type=int, default=5)
    bench.add_argument("--seed", type=int, default=0, help="master seed")
    bench.add_argument("--paper", action="store_true", help="published sizes up to 15000 (slow)")
    bench.add_argument("--output-dir", help="default: current directory")
    bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None):
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (MatrixIOError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run():
    sys.exit(main())
