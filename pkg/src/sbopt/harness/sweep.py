"""Post-hoc analysis under a wall-clock budget with an artificial evaluation time."""

from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ConfigError


def parse_grid(spec):
    """``"a:b:n"`` -> ``n`` log-spaced values from ``a`` to ``b``."""
    try:
        a, b, n = spec.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise ConfigError(f"grid must look like a:b:n, got {spec!r}") from None
    if a <= 0 or b <= 0 or n < 1:
        raise ConfigError("grid bounds must be positive and n >= 1")
    return np.geomspace(a, b, n) if n > 1 else np.array([a])


def affordable_iterations(model_times, eval_time, budget):
    """Largest ``m`` with ``sum_{j<=m}(model_time_j + eval_time) <= budget``."""
    cum = np.cumsum(np.asarray(model_times, dtype=float) + eval_time)
    return int(np.searchsorted(cum, budget, side="right"))


@dataclass
class SweepCell:
    eval_time: float
    budget: float
    winner: str
    winner_mean: float
    valid: bool
    tie: bool
    means: dict = field(default_factory=dict)
    iterations: dict = field(default_factory=dict)


@dataclass
class SweepResult:
    eval_times: np.ndarray
    budgets: np.ndarray
    cells: list
    diagnostic: str = ""

    @property
    def valid_cells(self):
        return [c for c in self.cells if c.valid]

    def cell(self, eval_time, budget):
        for c in self.cells:
            if c.eval_time == eval_time and c.budget == budget:
                return c
        return None


def _model_times(log):
    return log.records.model_times if hasattr(log, "records") else np.asarray(log[0])


def _best(log):
    return log.best_so_far if hasattr(log, "records") else np.asarray(log[1])


def time_budget_sweep(logs, eval_times, budgets, reference_budget=None):
    """Best strategy for each (evaluation time, time budget) pair.

    ``logs`` maps strategy name to a list of run logs (or of
    ``(model_times, best_so_far)`` pairs). A cell is skipped when the budget
    does not exceed the evaluation time or some run affords no evaluation.
    It is marked invalid when any run of any strategy could afford the whole
    ``reference_budget`` (the evaluation cap then binds, not the time budget).
    Ties go to the lexicographically smallest strategy name and are flagged.
    """
    names = sorted(logs)
    if not names or any(len(logs[n]) == 0 for n in names):
        raise ConfigError("every strategy needs at least one run")
    if reference_budget is None:
        reference_budget = max(len(_best(log)) for n in names for log in logs[n])
    cells = []
    for te in eval_times:
        for T in budgets:
            if T <= te:
                continue
            means, iters, absent = {}, {}, False
            for name in names:
                ms = [affordable_iterations(_model_times(log), te, T) for log in logs[name]]
                if min(ms) == 0:
                    absent = True
                    break
                iters[name] = ms
                means[name] = float(np.mean([_best(log)[m - 1] for log, m in zip(logs[name], ms)]))
            if absent:
                continue
            valid = all(m < reference_budget for ms in iters.values() for m in ms)
            best_val = min(means.values())
            tied = [n for n in names if means[n] == best_val]
            cells.append(
                SweepCell(float(te), float(T), tied[0], best_val, valid, len(tied) > 1, means, iters)
            )
    diagnostic = ""
    if not any(c.valid for c in cells):
        diagnostic = "no valid cell: every budget is too small or lets a run exhaust the evaluation cap"
    return SweepResult(np.asarray(eval_times, float), np.asarray(budgets, float), cells, diagnostic)
