"""CSV/JSON export of run logs, aggregates, sweeps and surfaces."""

import csv
import json
from collections import defaultdict
from pathlib import Path

import numpy as np

from ..core import EvaluationHistory, EvaluationRecord, RunLog
from .experiment import AggregateSeries

RUNS_COLUMNS = [
    "strategy", "run_id", "iteration", "point", "observed",
    "best_so_far", "model_time_s", "eval_time_s",
]
AGGREGATE_COLUMNS = ["strategy", "iteration", "mean_best", "std_best", "mean_cum_model_time_s"]
SWEEP_COLUMNS = ["eval_time_s", "budget_s", "winner", "winner_mean_objective", "valid"]
SURFACE_COLUMNS = ["x1", "x2", "model_value"]


def fmt(x):
    """Shortest text that round-trips a float (at most 17 significant digits)."""
    return repr(float(x))


def _open(path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def write_runs_csv(path, logs):
    """``logs`` maps strategy -> {run_id: RunLog}. Iterations are 1-based."""
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RUNS_COLUMNS)
        for name in sorted(logs):
            for run_id in sorted(logs[name]):
                log = logs[name][run_id]
                for m, rec in enumerate(log.records):
                    w.writerow([
                        name, run_id, m + 1, ";".join(str(v) for v in rec.point),
                        fmt(rec.observed), fmt(log.best_so_far[m]),
                        fmt(rec.model_time), fmt(rec.eval_time),
                    ])


def read_runs_csv(path):
    rows = defaultdict(list)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows[(row["strategy"], int(row["run_id"]))].append(row)
    logs = defaultdict(dict)
    for (name, run_id), recs in sorted(rows.items()):
        recs.sort(key=lambda r: int(r["iteration"]))
        history = EvaluationHistory(
            EvaluationRecord(
                tuple(int(v) for v in r["point"].split(";") if v != ""),
                float(r["observed"]),
                float(r["model_time_s"]),
                float(r["eval_time_s"]),
            )
            for r in recs
        )
        logs[name][run_id] = RunLog(config_id="", seed=0, records=history)
    return dict(logs)


def write_aggregates_csv(path, aggregates):
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGGREGATE_COLUMNS)
        for name in sorted(aggregates):
            agg = aggregates[name]
            for m in range(len(agg)):
                w.writerow([
                    name, m + 1, fmt(agg.mean_best[m]), fmt(agg.std_best[m]),
                    fmt(agg.mean_cum_model_time[m]),
                ])


def read_aggregates_csv(path):
    cols = defaultdict(lambda: defaultdict(list))
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            c = cols[row["strategy"]]
            for key in ("mean_best", "std_best", "mean_cum_model_time_s"):
                c[key].append(float(row[key]))
    return {
        name: AggregateSeries(
            strategy=name,
            mean_best=np.array(c["mean_best"]),
            std_best=np.array(c["std_best"]),
            mean_cum_model_time=np.array(c["mean_cum_model_time_s"]),
            n_runs=0,
        )
        for name, c in cols.items()
    }


def write_sweep_csv(path, sweep):
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for c in sweep.cells:
            w.writerow([fmt(c.eval_time), fmt(c.budget), c.winner, fmt(c.winner_mean), int(c.valid)])


def write_sweep_json(path, sweep):
    payload = {
        "diagnostic": sweep.diagnostic,
        "eval_times_s": [float(v) for v in sweep.eval_times],
        "budgets_s": [float(v) for v in sweep.budgets],
        "cells": [
            {
                "eval_time_s": c.eval_time,
                "budget_s": c.budget,
                "winner": c.winner,
                "winner_mean_objective": c.winner_mean,
                "valid": c.valid,
                "tie": c.tie,
                "means": c.means,
                "affordable_iterations": c.iterations,
            }
            for c in sweep.cells
        ],
    }
    write_json(path, payload)


def write_surface_csv(path, grid, truth=None):
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SURFACE_COLUMNS + (["true_value"] if truth is not None else []))
        for k, row in enumerate(grid):
            extra = [fmt(truth[k])] if truth is not None else []
            w.writerow([fmt(row[0]), fmt(row[1]), fmt(row[2])] + extra)


def write_json(path, payload):
    with _open(path) as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_experiment(out_dir, result):
    """Write runs.csv, aggregates.csv and manifest.json for an experiment."""
    out = Path(out_dir)
    write_runs_csv(out / "runs.csv", result.logs)
    write_aggregates_csv(out / "aggregates.csv", result.aggregates)
    manifest = {
        "config": result.config.to_dict(),
        "config_id": result.config.config_id,
        "seeds": {
            name: {str(run_id): log.seed for run_id, log in sorted(runs.items())}
            for name, runs in result.logs.items()
        },
        "failures": [
            {"strategy": f.strategy, "run_id": f.run_id, "message": f.message, "exit_code": f.exit_code}
            for f in result.failures
        ],
        "incomplete": result.incomplete,
    }
    write_json(out / "manifest.json", manifest)
