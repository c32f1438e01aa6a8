"""Discrete box-bounded problems, evaluation history and the optimization loop."""

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from sklearn.base import clone

from .exceptions import ConfigError, EvaluationFailure, NumericalFailure
from .validation import check_int_array


@dataclass(frozen=True)
class Bounds:
    """Per-dimension integer lower/upper bounds ``l_i <= x_i <= u_i``."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lower = tuple(int(v) for v in check_int_array(self.lower, "lower"))
        upper = tuple(int(v) for v in check_int_array(self.upper, "upper"))
        if len(lower) == 0:
            raise ConfigError("bounds need at least one dimension")
        if len(lower) != len(upper):
            raise ConfigError("lower and upper bounds differ in length")
        if any(lo > up for lo, up in zip(lower, upper)):
            raise ConfigError("every lower bound must be <= its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def uniform(cls, dim, lower, upper):
        return cls((lower,) * dim, (upper,) * dim)

    @property
    def dim(self):
        return len(self.lower)

    @property
    def lower_array(self):
        return np.asarray(self.lower, dtype=np.int64)

    @property
    def upper_array(self):
        return np.asarray(self.upper, dtype=np.int64)

    @property
    def widths(self):
        return self.upper_array - self.lower_array

    def contains(self, x):
        x = np.asarray(x)
        return (
            x.shape == (self.dim,)
            and bool(np.all(x >= self.lower_array))
            and bool(np.all(x <= self.upper_array))
        )

    def clip(self, x):
        return np.clip(x, self.lower_array, self.upper_array)

    def as_float_pairs(self):
        """Bounds as ``[(l_i, u_i), ...]`` for scipy optimizers."""
        return [(float(lo), float(up)) for lo, up in zip(self.lower, self.upper)]


@dataclass(frozen=True)
class BudgetSpec:
    max_evaluations: int
    wall_clock_limit: Optional[float] = None

    def __post_init__(self):
        if int(self.max_evaluations) != self.max_evaluations or self.max_evaluations < 1:
            raise ConfigError("max_evaluations must be a positive integer")
        if self.wall_clock_limit is not None and not self.wall_clock_limit > 0:
            raise ConfigError("wall_clock_limit must be positive")


@dataclass(frozen=True)
class EvaluationRecord:
    point: tuple
    observed: float
    model_time: float = 0.0
    eval_time: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.observed):
            raise ValueError("observed value must be finite")
        if self.model_time < 0 or self.eval_time < 0:
            raise ValueError("timings must be non-negative")


class EvaluationHistory:
    """Append-only sequence of evaluation records owned by a single run."""

    def __init__(self, records=()):
        self._records = []
        for rec in records:
            self.append(rec)

    def append(self, record):
        if not isinstance(record, EvaluationRecord):
            raise TypeError("expected an EvaluationRecord")
        self._records.append(record)

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def __getitem__(self, idx):
        return self._records[idx]

    @property
    def X(self):
        if not self._records:
            return np.empty((0, 0), dtype=np.int64)
        return np.array([r.point for r in self._records], dtype=np.int64)

    @property
    def y(self):
        return np.array([r.observed for r in self._records], dtype=float)

    @property
    def model_times(self):
        return np.array([r.model_time for r in self._records], dtype=float)

    @property
    def eval_times(self):
        return np.array([r.eval_time for r in self._records], dtype=float)


def best_so_far(history):
    """Running minimum of the observed values.

    Accepts an :class:`EvaluationHistory` or a plain sequence of reals.
    """
    if isinstance(history, EvaluationHistory):
        values = history.y
    else:
        values = np.asarray(history, dtype=float)
    if values.size == 0:
        raise ValueError("best_so_far needs a non-empty history")
    return np.minimum.accumulate(values)


@dataclass
class RunLog:
    config_id: str
    seed: int
    records: EvaluationHistory
    best_so_far: np.ndarray = field(default=None)
    error: Optional[str] = None

    def __post_init__(self):
        if self.best_so_far is None:
            self.best_so_far = (
                best_so_far(self.records) if len(self.records) else np.empty(0)
            )

    def __len__(self):
        return len(self.records)

    @property
    def best_index(self):
        # argmin returns the first occurrence, so ties keep the earliest point
        return int(np.argmin(self.records.y))

    @property
    def best_point(self):
        return np.asarray(self.records[self.best_index].point)

    @property
    def best_value(self):
        return float(self.best_so_far[-1])


def search_space_size(bounds):
    """Number of integer points in the box, as an exact Python int."""
    return math.prod(u - l + 1 for l, u in zip(bounds.lower, bounds.upper))


def uniform_sample(bounds, rng):
    """Draw each coordinate uniformly from ``{l_i, ..., u_i}``."""
    return rng.integers(bounds.lower_array, bounds.upper_array, endpoint=True)


def spawn_streams(seed):
    """Split a master seed into initial-design, strategy and noise streams.

    The streams are independent, so swapping the strategy leaves the noise
    realisation of the problem unchanged.
    """
    ss = np.random.SeedSequence(int(seed))
    init_ss, strategy_ss, noise_ss = ss.spawn(3)
    return np.random.default_rng(init_ss), strategy_ss, np.random.default_rng(noise_ss)


def run_optimization(problem, strategy, budget, seed, config_id="", clock=time.perf_counter):
    """Run the surrogate-based optimization loop on ``problem``.

    ``strategy`` is an unfitted strategy template; it is cloned and bound to the
    problem's bounds and a seed-derived stream, so the template itself is never
    mutated. The first ``initial_design_size`` points are uniform samples.

    ``model_time`` of record ``m`` is the time spent producing point ``m``
    (fitting on the first ``m - 1`` records plus the suggestion).
    """
    if not isinstance(budget, BudgetSpec):
        budget = BudgetSpec(int(budget))
    init_rng, strategy_ss, noise_rng = spawn_streams(seed)
    strat = clone(strategy).set_params(bounds=problem.bounds, random_state=strategy_ss)
    n_initial = min(int(strat.initial_design_size), budget.max_evaluations)
    history = EvaluationHistory()
    bounds = problem.bounds

    def _log(error=None):
        return RunLog(config_id=config_id, seed=int(seed), records=history, error=error)

    start = clock()
    for m in range(budget.max_evaluations):
        t0 = clock()
        try:
            if m < n_initial:
                x = uniform_sample(bounds, init_rng)
            else:
                strat.fit(history.X, history.y)
                x = strat.suggest()
        except NumericalFailure as exc:
            raise NumericalFailure(
                f"strategy failed at iteration {m}: {exc}", partial_log=_log(str(exc))
            ) from exc
        model_time = clock() - t0
        x = np.asarray(x, dtype=np.int64)
        if not bounds.contains(x):
            raise NumericalFailure(
                f"strategy proposed an infeasible point at iteration {m}",
                partial_log=_log("infeasible suggestion"),
            )
        if budget.wall_clock_limit is not None and clock() - start >= budget.wall_clock_limit:
            break
        t1 = clock()
        try:
            y = float(problem.evaluate(x, noise_rng))
        except EvaluationFailure as exc:
            exc.partial_log = _log(str(exc))
            raise
        eval_time = clock() - t1
        if not math.isfinite(y):
            raise EvaluationFailure(
                f"objective returned non-finite value {y} at iteration {m}",
                partial_log=_log("non-finite objective"),
            )
        history.append(
            EvaluationRecord(tuple(int(v) for v in x), y, max(model_time, 0.0), max(eval_time, 0.0))
        )
    return _log()
