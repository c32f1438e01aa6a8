"""Repeated runs of several strategies on one problem, plus aggregation."""

import logging
import zlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

from ..core import Bounds, BudgetSpec, run_optimization
from ..exceptions import ConfigError, SbOptError
from ..problems import ExternalCommand, MaxCut, PerturbedTSP, Rosenbrock
from ..problems.wrappers import Binarized, Shuffled
from ..surrogates import STRATEGIES, make_strategy
from ..tsplib import read_atsp

logger = logging.getLogger(__name__)

PROBLEMS = ("rosenbrock", "maxcut", "tsp", "external")
# label for experiments whose problem object is passed to run_experiment directly
CUSTOM = "custom"


def derive_seed(master, name, index):
    """64-bit seed that depends only on ``(master, name, index)``."""
    ss = np.random.SeedSequence([int(master), zlib.crc32(name.encode()), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass
class ExperimentConfig:
    problem: str
    strategies: tuple = ("gp", "pl", "dr", "rs")
    budget: Optional[int] = None
    runs: int = 5
    seed: int = 0
    problem_params: dict = field(default_factory=dict)
    strategy_params: dict = field(default_factory=dict)
    binarize: bool = False
    shuffle: bool = False
    n_jobs: int = 1
    wall_clock_limit: Optional[float] = None

    def __post_init__(self):
        if self.problem not in PROBLEMS + (CUSTOM,):
            raise ConfigError(f"unknown problem {self.problem!r}; choose from {PROBLEMS}")
        self.strategies = tuple(self.strategies)
        if not self.strategies:
            raise ConfigError("at least one strategy is required")
        for name in self.strategies:
            if name not in STRATEGIES:
                raise ConfigError(f"unknown strategy {name!r}")
        if self.budget is None:
            self.budget = 100 if self.problem == "external" else 500
        if int(self.budget) != self.budget or self.budget < 1:
            raise ConfigError("budget must be a positive integer")
        if int(self.runs) != self.runs or self.runs < 1:
            raise ConfigError("runs must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @property
    def config_id(self):
        parts = [self.problem]
        dim = self.problem_params.get("dim")
        if dim is not None:
            parts.append(f"d{dim}")
        if self.binarize:
            parts.append("bin")
        if self.shuffle:
            parts.append("shuf")
        return "-".join(parts)

    def to_dict(self):
        return {
            "problem": self.problem,
            "strategies": list(self.strategies),
            "budget": self.budget,
            "runs": self.runs,
            "seed": self.seed,
            "problem_params": dict(self.problem_params),
            "strategy_params": {k: dict(v) for k, v in self.strategy_params.items()},
            "binarize": self.binarize,
            "shuffle": self.shuffle,
            "wall_clock_limit": self.wall_clock_limit,
        }


def build_problem(config):
    p = dict(config.problem_params)
    if config.problem == CUSTOM:
        raise ConfigError("a custom experiment needs an explicit problem object")
    if config.problem == "rosenbrock":
        problem = Rosenbrock(
            dim=p.get("dim", 49),
            lower=p.get("lower", -5),
            upper=p.get("upper", 10),
            noise_std=p.get("noise_std", 1e-6),
        )
    elif config.problem == "maxcut":
        problem = MaxCut.random(
            n=p.get("dim", 150),
            edge_probability=p.get("edge_probability", 0.5),
            max_weight=p.get("max_weight", 10.0),
            seed=config.seed,
            noise_std=p.get("noise_std", 1.0),
        )
    elif config.problem == "tsp":
        if not p.get("tsplib"):
            raise ConfigError("the tsp problem needs a TSPLIB file (--tsplib)")
        try:
            instance = read_atsp(p["tsplib"])
        except OSError as exc:
            raise ConfigError(f"cannot read TSPLIB file {p['tsplib']}: {exc.strerror}") from exc
        problem = PerturbedTSP(instance, repetitions=p.get("repetitions", 100))
    else:
        if not p.get("cmd"):
            raise ConfigError("the external problem needs a command template (--cmd)")
        bounds = Bounds.uniform(p.get("dim", 49), p.get("lower", 0), p.get("upper", 7))
        problem = ExternalCommand(p["cmd"], bounds=bounds, timeout=p.get("timeout"))
    if config.binarize:
        problem = Binarized(problem)
    if config.shuffle:
        problem = Shuffled(problem, seed=derive_seed(config.seed, "shuffle", 0))
    return problem


@dataclass
class AggregateSeries:
    strategy: str
    mean_best: np.ndarray
    std_best: np.ndarray
    mean_cum_model_time: np.ndarray
    n_runs: int

    def __len__(self):
        return len(self.mean_best)


def aggregate_runs(strategy, logs):
    """Per-iteration mean/std of best-so-far and mean cumulative model time.

    Runs stopped early by a wall-clock limit truncate the series to the
    shortest run.
    """
    if not logs:
        raise ValueError(f"no completed runs for {strategy}")
    n = min(len(log) for log in logs)
    best = np.array([log.best_so_far[:n] for log in logs])
    cum_model = np.array([np.cumsum(log.records.model_times[:n]) for log in logs])
    return AggregateSeries(
        strategy=strategy,
        mean_best=best.mean(axis=0),
        std_best=best.std(axis=0),
        mean_cum_model_time=cum_model.mean(axis=0),
        n_runs=len(logs),
    )


@dataclass
class RunFailure:
    strategy: str
    run_id: int
    message: str
    exit_code: int
    partial_log: object = None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    logs: dict
    aggregates: dict
    failures: list

    @property
    def incomplete(self):
        return bool(self.failures)


def _one_run(problem, strategy_name, params, budget, seed, run_id, config_id):
    strategy = make_strategy(strategy_name, **params)
    try:
        log = run_optimization(problem, strategy, budget, seed, config_id=config_id)
        return log, None
    except SbOptError as exc:
        failure = RunFailure(
            strategy_name, run_id, str(exc), exc.exit_code, getattr(exc, "partial_log", None)
        )
        return None, failure


def run_experiment(config, problem=None):
    """Run ``config.runs`` repetitions of every strategy.

    Seeds are derived from ``(master seed, strategy, run index)``. Failed runs
    are collected in ``result.failures`` and left out of the aggregates.
    """
    problem = problem if problem is not None else build_problem(config)
    budget = BudgetSpec(config.budget, config.wall_clock_limit)
    jobs = [
        (name, run_id, derive_seed(config.seed, name, run_id))
        for name in config.strategies
        for run_id in range(config.runs)
    ]
    outputs = Parallel(n_jobs=config.n_jobs)(
        delayed(_one_run)(
            problem, name, config.strategy_params.get(name, {}), budget, seed, run_id, config.config_id
        )
        for name, run_id, seed in jobs
    )
    logs = {name: [] for name in config.strategies}
    failures = []
    for (name, run_id, _), (log, failure) in zip(jobs, outputs):
        if failure is not None:
            logger.warning("%s run %d failed: %s", name, run_id, failure.message)
            failures.append(failure)
        else:
            logs[name].append((run_id, log))
    aggregates = {}
    for name in config.strategies:
        if logs[name]:
            aggregates[name] = aggregate_runs(name, [log for _, log in logs[name]])
    logs = {name: dict(entries) for name, entries in logs.items()}
    return ExperimentResult(config, logs, aggregates, failures)
