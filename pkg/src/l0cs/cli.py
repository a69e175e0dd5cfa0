"""Command-line entry point.

Subcommands: ``gen``, ``solve``, ``bench``, ``analyze``, ``plot``.  Options may
also come from a ``key = value`` config file given with ``--config``; flags on
the command line win.  Exit status is 0 on success, 1 on usage errors and 2
on numerical failure (divergence, singular matrix, unstable step size).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import (
    StabilityError,
    TheoremParams,
    msd_upper_bound,
    mu_upper_bound,
    noise_projection_ratio,
    steady_state_msd,
    theorem_constant,
)
from .bench import emit_plot, experiment_preset, merge_results, read_results, run_experiment, write_results
from .core import load_instance, make_instance, msd, relative_error, save_instance
from .projection import SingularMatrixError
from .solvers import DivergenceError, SolverKind, preset, run

EXIT_USAGE = 1
EXIT_NUMERIC = 2

# flag name -> (type, builtin default)
OPTIONS = {
    "n": (int, 1000),
    "m": (int, 200),
    "k": (int, 30),
    "sigma": (float, 3.2e-3),
    "seed": (int, 0),
    "trials": (int, None),
    "solver": (str, "l0lms"),
    "mu": (float, None),
    "kappa": (float, None),
    "alpha": (float, None),
    "q": (int, None),
    "lambda": (float, None),
    "beta": (float, None),
    "epsilon": (float, None),
    "max-iter": (int, None),
    "tau-exact": (float, None),
    "out": (str, None),
    "normalize": (str, "peak"),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("_", "-").lstrip("-")
        if key not in OPTIONS and key not in ("a", "b", "s-l1", "metric", "instance", "plot"):
            raise UsageError(f"{path}:{lineno}: unknown option {key!r}")
        values[key] = value
    return values


def _add_flags(p: argparse.ArgumentParser, names):
    for name in names:
        typ, _ = OPTIONS[name]
        p.add_argument(f"--{name}", type=typ, default=None, dest=name.replace("-", "_"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="l0cs", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key = value file supplying default flag values")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="write a random problem instance (.npz)")
    _add_flags(gen, ["n", "m", "k", "sigma", "seed", "normalize", "out"])

    solver_flags = ["solver", "mu", "kappa", "alpha", "q", "lambda", "beta", "epsilon", "max-iter"]
    solve = sub.add_parser("solve", help="reconstruct one instance and print a report")
    solve.add_argument("--instance", help="instance file from 'gen'; otherwise one is generated")
    _add_flags(solve, ["n", "m", "k", "sigma", "seed", "normalize", "out"] + solver_flags)

    bench = sub.add_parser("bench", help="run a preset experiment")
    bench.add_argument("experiment", choices=["exp1", "exp2", "exp3", "exp4", "exp5"])
    bench.add_argument("--plot", help="also write an SVG chart here")
    bench.add_argument("--workers", type=int, default=1)
    _add_flags(bench, ["n", "m", "k", "sigma", "seed", "trials", "tau-exact", "out", "normalize"])

    analyze = sub.add_parser("analyze", help="steady-state predictions for l0-LMS")
    _add_flags(analyze, ["n", "m", "sigma", "mu", "kappa", "alpha"])
    analyze.add_argument("--a", type=float, default=None)
    analyze.add_argument("--b", type=float, default=None)
    analyze.add_argument("--s-l1", type=float, default=None, dest="s_l1")

    plot = sub.add_parser("plot", help="render a results CSV as SVG")
    plot.add_argument("csv")
    plot.add_argument("--metric", choices=["success_prob", "mean_msd"], default=None)
    _add_flags(plot, ["out"])
    return parser


def _resolve(args, config: dict) -> dict:
    """Merge flags over config over builtin defaults."""
    opts = {}
    for name, (typ, default) in OPTIONS.items():
        attr = name.replace("-", "_")
        value = getattr(args, attr, None)
        if value is None and name in config:
            try:
                value = typ(config[name])
            except ValueError as exc:
                raise UsageError(f"bad value for {name} in config: {config[name]!r}") from exc
        opts[attr] = default if value is None else value
    for extra in ("a", "b", "s_l1", "instance", "plot", "metric"):
        value = getattr(args, extra, None)
        key = extra.replace("_", "-")
        if value is None and key in config:
            value = config[key] if extra in ("instance", "plot", "metric") else float(config[key])
        opts[extra] = value
    return opts


def solver_config(opts: dict):
    try:
        kind = SolverKind(opts["solver"])
    except ValueError as exc:
        raise UsageError(f"unknown solver {opts['solver']!r}") from exc
    changes = {}
    for key, field in [
        ("mu", "mu"), ("kappa", "kappa"), ("alpha", "alpha"), ("q", "window"),
        ("lambda", "forgetting"), ("beta", "beta"), ("epsilon", "epsilon"), ("max_iter", "max_iter"),
    ]:
        if opts.get(key) is not None:
            changes[field] = opts[key]
    try:
        return preset(kind, **changes)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _cmd_gen(opts):
    if not opts["out"]:
        raise UsageError("gen needs --out")
    problem = make_instance(
        opts["m"], opts["n"], opts["k"], sigma=opts["sigma"], seed=opts["seed"], normalize=opts["normalize"]
    )
    save_instance(problem, opts["out"])
    print(f"wrote {opts['out']}: M={opts['m']} N={opts['n']} K={opts['k']} sigma={opts['sigma']:g}")


def _cmd_solve(opts):
    if opts["instance"]:
        problem = load_instance(opts["instance"])
    else:
        problem = make_instance(
            opts["m"], opts["n"], opts["k"], sigma=opts["sigma"], seed=opts["seed"], normalize=opts["normalize"]
        )
    cfg = solver_config(opts)
    report = run(problem, cfg)
    truth = problem.truth.values
    summary = {
        "solver": cfg.kind.value,
        "iterations": report.iterations,
        "converged": report.converged,
        "stop_reason": report.stop_reason,
        "seconds": round(report.elapsed, 6),
        "msd": msd(report.final_estimate, truth),
        "relative_error": relative_error(report.final_estimate, truth),
    }
    print(json.dumps(summary, indent=2))
    if opts["out"]:
        np.savetxt(opts["out"], report.final_estimate)


def _cmd_bench(args, opts, config):
    def explicit(key):
        return getattr(args, key, None) is not None or key in config

    overrides = dict(master_seed=opts["seed"], normalize=opts["normalize"])
    if opts["trials"] is not None:
        overrides["trials"] = opts["trials"]
    if opts["tau_exact"] is not None:
        overrides["tau_exact"] = opts["tau_exact"]
    if args.experiment == "exp5":
        ms = [opts["m"]] if explicit("m") else [200, 250, 300, 350, 400]
        parts = [run_experiment(experiment_preset("exp5", m=m, **overrides), workers=args.workers) for m in ms]
        result = merge_results(*parts)
    else:
        for key in ("n", "m", "k"):
            if explicit(key):
                overrides[key] = opts[key]
        if args.experiment == "exp1" and explicit("sigma"):
            overrides.update(sigma=opts["sigma"], grid=(opts["sigma"],))
        result = run_experiment(experiment_preset(args.experiment, **overrides), workers=args.workers)
    out = opts["out"] or f"{args.experiment}.csv"
    write_results(result, out)
    for r in result.rows:
        print(
            f"{r.solver:>16s} {r.sweep_var}={r.sweep_value:<8g} success={r.success_prob:.3f} "
            f"msd={r.mean_msd:.4g} iters={r.mean_iters:.0f} sec={r.mean_seconds:.4g}"
        )
    if opts["plot"]:
        emit_plot(result, opts["plot"], title=args.experiment)


def _cmd_analyze(opts):
    M, N = opts["m"], opts["n"]
    mu = opts["mu"] if opts["mu"] is not None else 0.1
    kappa = opts["kappa"] if opts["kappa"] is not None else 0.0
    alpha = opts["alpha"] if opts["alpha"] is not None else 10.0
    p = TheoremParams(
        M=M, N=N, mu=mu, kappa=kappa, alpha=alpha, noise_power=opts["sigma"] ** 2,
        a=opts["a"] or 0.0, b=opts["b"] or 0.0, s_l1=opts["s_l1"] or 0.0,
    )
    out = {
        "mu_upper_bound": mu_upper_bound(M, N),
        "theorem_constant": theorem_constant(M, N, mu),
        "steady_state_msd": steady_state_msd(p),
        "msd_upper_bound": msd_upper_bound(p),
        "noise_projection_ratio": noise_projection_ratio(M, N),
    }
    print(json.dumps(out, indent=2))


def _cmd_plot(args, opts):
    out = opts["out"] or str(Path(args.csv).with_suffix(".svg"))
    emit_plot(read_results(args.csv), out, metric=args.metric)
    print(f"wrote {out}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = read_config(args.config) if args.config else {}
        opts = _resolve(args, config)
        if args.command == "gen":
            _cmd_gen(opts)
        elif args.command == "solve":
            _cmd_solve(opts)
        elif args.command == "bench":
            _cmd_bench(args, opts, config)
        elif args.command == "analyze":
            _cmd_analyze(opts)
        elif args.command == "plot":
            _cmd_plot(args, opts)
    except (UsageError, FileNotFoundError) as exc:
        print(f"l0cs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DivergenceError, SingularMatrixError, StabilityError) as exc:
        print(f"l0cs: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"l0cs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
