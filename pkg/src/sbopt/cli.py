"""Command line interface: ``run``, ``sweep`` and ``surface``."""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .core import EvaluationHistory
from .exceptions import ConfigError, SbOptError
from .harness import (
    ExperimentConfig,
    build_problem,
    read_runs_csv,
    run_experiment,
    surface_export,
    time_budget_sweep,
    write_experiment,
    write_surface_csv,
    write_sweep_csv,
    write_sweep_json,
)
from .harness.sweep import parse_grid
from .problems.rosenbrock import rosenbrock
from .surrogates import make_strategy

logger = logging.getLogger("sbopt")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ConfigError.exit_code, f"{self.prog}: error: {message}\n")


def _strategy_params(args):
    params = {
        "gp": {"kappa": args.kappa},
        "pl": {"alpha": args.ridge, "p_explore": args.p_explore},
        "dr": {"gamma": args.gamma, "smoothing": args.smoothing, "n_candidates": args.candidates},
        "rs": {},
    }
    return params


def _add_strategy_flags(p):
    p.add_argument("--kappa", type=float, default=2.576, help="confidence-bound weight (gp)")
    p.add_argument("--ridge", type=float, default=1e-3, help="ridge penalty (pl)")
    p.add_argument("--p-explore", type=float, default=None, help="flip probability per coordinate (pl, default 1/d)")
    p.add_argument("--gamma", type=float, default=0.25, help="good-set quantile (dr)")
    p.add_argument("--smoothing", type=float, default=1.0, help="pseudo-count (dr)")
    p.add_argument("--candidates", type=int, default=24, help="candidate pool size (dr)")


def build_parser():
    parser = _Parser(prog="sbopt", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run repeated optimization experiments")
    run.add_argument("--problem", required=True, choices=["rosenbrock", "maxcut", "tsp", "external"])
    run.add_argument("--dim", type=int, default=None)
    run.add_argument("--algo", default="gp,pl,dr,rs", help="comma-separated strategies")
    run.add_argument("--budget", type=int, default=None, help="evaluations per run (500, or 100 for external)")
    run.add_argument("--runs", type=int, default=5)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", required=True, type=Path)
    run.add_argument("--binarize", action="store_true")
    run.add_argument("--shuffle", action="store_true")
    run.add_argument("--tsplib", type=Path, default=None)
    run.add_argument("--cmd", default=None, help="command template containing {x}")
    run.add_argument("--lower", type=int, default=None)
    run.add_argument("--upper", type=int, default=None)
    run.add_argument("--timeout", type=float, default=None, help="external command timeout (s)")
    run.add_argument("--edge-prob", type=float, default=0.5)
    run.add_argument("--max-weight", type=float, default=10.0)
    run.add_argument("--time-limit", type=float, default=None, help="wall-clock limit per run (s)")
    run.add_argument("--n-jobs", type=int, default=1)
    _add_strategy_flags(run)

    sweep = sub.add_parser("sweep", help="time-budget analysis of stored runs")
    sweep.add_argument("--logs", required=True, type=Path, help="directory containing runs.csv")
    sweep.add_argument("--eval-times", default="10:1500:12")
    sweep.add_argument("--budgets", default="100:10000:12")
    sweep.add_argument("--reference-budget", type=int, default=None)
    sweep.add_argument("--out", type=Path, default=None, help="output directory (default: --logs)")

    surface = sub.add_parser("surface", help="export a fitted 2-d surrogate on a grid")
    surface.add_argument("--problem", default="rosenbrock", choices=["rosenbrock"])
    surface.add_argument("--dim", type=int, default=2)
    surface.add_argument("--algo", default="gp", choices=["gp", "pl"])
    surface.add_argument("--resolution", type=int, default=100)
    surface.add_argument("--runs", type=int, default=15)
    surface.add_argument("--budget", type=int, default=50)
    surface.add_argument("--seed", type=int, default=0)
    surface.add_argument("--out", type=Path, default=Path("."))
    _add_strategy_flags(surface)
    return parser


def _problem_params(args):
    params = {}
    if args.dim is not None:
        params["dim"] = args.dim
    if args.lower is not None:
        params["lower"] = args.lower
    if args.upper is not None:
        params["upper"] = args.upper
    if args.problem == "maxcut":
        params.update(edge_probability=args.edge_prob, max_weight=args.max_weight)
    if args.tsplib is not None:
        params["tsplib"] = str(args.tsplib)
    if args.cmd is not None:
        params["cmd"] = args.cmd
    if args.timeout is not None:
        params["timeout"] = args.timeout
    return params


def cmd_run(args):
    config = ExperimentConfig(
        problem=args.problem,
        strategies=tuple(s.strip() for s in args.algo.split(",") if s.strip()),
        budget=args.budget,
        runs=args.runs,
        seed=args.seed,
        problem_params=_problem_params(args),
        strategy_params=_strategy_params(args),
        binarize=args.binarize,
        shuffle=args.shuffle,
        n_jobs=args.n_jobs,
        wall_clock_limit=args.time_limit,
    )
    result = run_experiment(config)
    write_experiment(args.out, result)
    for name, agg in sorted(result.aggregates.items()):
        print(f"{name}: mean final best {agg.mean_best[-1]:.6g} (std {agg.std_best[-1]:.3g}) over {agg.n_runs} runs")
    if result.failures:
        for f in result.failures:
            print(f"{f.strategy} run {f.run_id} failed: {f.message}", file=sys.stderr)
        return max(f.exit_code for f in result.failures)
    return 0


def cmd_sweep(args):
    eval_times, budgets = parse_grid(args.eval_times), parse_grid(args.budgets)
    path = args.logs / "runs.csv"
    if not path.is_file():
        raise ConfigError(f"no run log at {path}")
    logs = read_runs_csv(path)
    logs = {name: [runs[k] for k in sorted(runs)] for name, runs in logs.items()}
    result = time_budget_sweep(logs, eval_times, budgets, args.reference_budget)
    out = args.out or args.logs
    write_sweep_csv(out / "sweep.csv", result)
    write_sweep_json(out / "sweep.json", result)
    if result.diagnostic:
        print(result.diagnostic, file=sys.stderr)
    print(f"{len(result.valid_cells)} valid of {len(result.cells)} cells")
    return 0


def cmd_surface(args):
    config = ExperimentConfig(
        problem=args.problem,
        strategies=(args.algo,),
        budget=args.budget,
        runs=args.runs,
        seed=args.seed,
        problem_params={"dim": args.dim},
        strategy_params=_strategy_params(args),
    )
    problem = build_problem(config)
    if problem.bounds.dim != 2:
        raise ConfigError("surface export needs --dim 2")
    result = run_experiment(config, problem=problem)
    runs = result.logs[args.algo]
    if not runs:
        raise ConfigError("no run completed")
    best_id = min(runs, key=lambda k: (runs[k].best_value, k))
    history = runs[best_id].records
    strategy = make_strategy(args.algo, **config.strategy_params[args.algo])
    strategy.set_params(bounds=problem.bounds, random_state=runs[best_id].seed)
    strategy.fit(history.X, history.y)
    grid = surface_export(strategy, problem.bounds, args.resolution)
    truth = [rosenbrock(row[:2]) for row in grid]
    write_surface_csv(args.out / "surface.csv", grid, truth)
    print(f"best run {best_id}: final best {runs[best_id].best_value:.6g}; wrote {args.out / 'surface.csv'}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    handlers = {"run": cmd_run, "sweep": cmd_sweep, "surface": cmd_surface}
    try:
        return handlers[args.command](args)
    except SbOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
