import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbopt import Bounds, ConfigError, EvaluationHistory, EvaluationRecord, RunLog
from sbopt.harness import (
    ExperimentConfig,
    affordable_iterations,
    aggregate_runs,
    derive_seed,
    parse_grid,
    read_aggregates_csv,
    read_runs_csv,
    run_experiment,
    surface_export,
    surface_grid,
    time_budget_sweep,
    write_aggregates_csv,
    write_experiment,
    write_runs_csv,
    write_surface_csv,
    write_sweep_csv,
    write_sweep_json,
)
from sbopt.problems import FunctionProblem
from sbopt.surrogates import gp_fit, pl_fit


def synthetic_log(model_times, values):
    recs = [EvaluationRecord((0,), float(v), float(t), 0.0) for t, v in zip(model_times, values)]
    return RunLog("synthetic", 0, EvaluationHistory(recs))


def oracle_iterations(model_times, te, T):
    total, m = 0.0, 0
    for mt in model_times:
        total += mt + te
        if total > T:
            break
        m += 1
    return m


def random_logs(rng, names=("a", "b", "c"), runs=3, B=40):
    return {
        n: [synthetic_log(rng.exponential(5.0, B), rng.normal(size=B) * 10 + 50) for _ in range(runs)]
        for n in names
    }


def quadratic_problem():
    return FunctionProblem(lambda x: float((x[0] - 2) ** 2), Bounds((0,), (3,)), name="quad")


class TestSeeds:
    def test_derive_seed_is_pure(self):
        assert derive_seed(3, "gp", 1) == derive_seed(3, "gp", 1)
        assert len({derive_seed(3, n, i) for n in ("gp", "pl") for i in range(5)}) == 10
        assert derive_seed(3, "gp", 1) != derive_seed(4, "gp", 1)


class TestExperiment:
    def test_single_run_has_zero_std(self):
        cfg = ExperimentConfig(problem="rosenbrock", strategies=("rs", "dr"), budget=12, runs=1,
                               problem_params={"dim": 3})
        res = run_experiment(cfg)
        for agg in res.aggregates.values():
            assert len(agg) == 12
            assert np.all(agg.std_best == 0)

    def test_random_search_finds_global_minimum(self):
        cfg = ExperimentConfig(problem="custom", strategies=("rs",), budget=40, runs=5, seed=2)
        res = run_experiment(cfg, problem=quadratic_problem())
        assert res.aggregates["rs"].mean_best[-1] == 0.0

    def test_aggregate_is_monotone(self):
        cfg = ExperimentConfig(problem="rosenbrock", strategies=("rs", "pl"), budget=15, runs=3,
                               problem_params={"dim": 4})
        res = run_experiment(cfg)
        for agg in res.aggregates.values():
            assert np.all(np.diff(agg.mean_best) <= 0)
            assert np.all(agg.std_best >= 0)
            assert np.all(np.diff(agg.mean_cum_model_time) >= 0)

    def test_rerun_gives_identical_csv_apart_from_timing(self, tmp_path):
        cfg = ExperimentConfig(problem="rosenbrock", strategies=("gp", "rs"), budget=8, runs=2, seed=5,
                               problem_params={"dim": 3})
        for name in ("a", "b"):
            write_experiment(tmp_path / name, run_experiment(cfg))

        def stripped(path):
            with open(path) as fh:
                return [{k: v for k, v in row.items() if not k.endswith("_time_s")} for row in csv.DictReader(fh)]

        assert stripped(tmp_path / "a" / "runs.csv") == stripped(tmp_path / "b" / "runs.csv")
        ma = json.loads((tmp_path / "a" / "manifest.json").read_text())
        mb = json.loads((tmp_path / "b" / "manifest.json").read_text())
        assert ma == mb

    def test_parallel_matches_serial(self):
        base = dict(problem="maxcut", strategies=("rs", "dr"), budget=6, runs=3, problem_params={"dim": 8})
        a = run_experiment(ExperimentConfig(**base, n_jobs=1))
        b = run_experiment(ExperimentConfig(**base, n_jobs=2))
        for name in ("rs", "dr"):
            for run_id in range(3):
                assert a.logs[name][run_id].records.X.tolist() == b.logs[name][run_id].records.X.tolist()
                assert a.logs[name][run_id].records.y.tolist() == b.logs[name][run_id].records.y.tolist()

    def test_failures_are_recorded(self):
        def broken(x):
            return float("nan") if x[0] == 3 else float(x[0])

        problem = FunctionProblem(broken, Bounds((0,), (3,)))
        cfg = ExperimentConfig(problem="custom", strategies=("rs",), budget=30, runs=2)
        res = run_experiment(cfg, problem=problem)
        assert res.incomplete
        assert {f.exit_code for f in res.failures} == {4}

    def test_invalid_config(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(problem="rosenbrock", runs=0)
        with pytest.raises(ConfigError):
            ExperimentConfig(problem="rosenbrock", strategies=("gp", "nope"))

    def test_default_budgets(self):
        assert ExperimentConfig(problem="rosenbrock").budget == 500
        assert ExperimentConfig(problem="external").budget == 100
        assert ExperimentConfig(problem="rosenbrock").runs == 5


class TestSweep:
    def test_affordable_iterations_match_oracle(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            mt = rng.exponential(3.0, size=50)
            te, T = rng.uniform(0, 20), rng.uniform(1, 1000)
            assert affordable_iterations(mt, te, T) == oracle_iterations(mt, te, T)

    def test_zero_model_time(self):
        logs = {"a": [synthetic_log(np.zeros(50), np.arange(50.0, 0, -1))] * 3}
        res = time_budget_sweep(logs, [10.0], [100.0])
        assert res.cells[0].iterations["a"] == [10, 10, 10]
        assert res.cells[0].winner_mean == 41.0

    def test_budget_equal_to_eval_time_is_absent(self):
        logs = {"a": [synthetic_log(np.zeros(5), np.ones(5))]}
        res = time_budget_sweep(logs, [10.0], [10.0, 5.0])
        assert res.cells == []
        assert res.diagnostic

    def test_cells_match_bruteforce(self):
        rng = np.random.default_rng(4)
        logs = random_logs(rng)
        tes, Ts = parse_grid("10:1500:12"), parse_grid("100:10000:12")
        res = time_budget_sweep(logs, tes, Ts, reference_budget=40)
        expected = []
        for te in tes:
            for T in Ts:
                if T <= te:
                    continue
                ms = {n: [oracle_iterations(l.records.model_times, te, T) for l in logs[n]] for n in logs}
                if min(min(v) for v in ms.values()) == 0:
                    continue
                means = {n: np.mean([l.best_so_far[m - 1] for l, m in zip(logs[n], ms[n])]) for n in logs}
                winner = min(sorted(means), key=lambda n: means[n])
                valid = all(m < 40 for v in ms.values() for m in v)
                expected.append((te, T, winner, means[winner], valid, ms))
        got = [(c.eval_time, c.budget, c.winner, c.winner_mean, c.valid, c.iterations) for c in res.cells]
        assert got == expected

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6))
    def test_winner_non_increasing_in_budget(self, seed):
        rng = np.random.default_rng(seed)
        logs = random_logs(rng, B=30)
        tes, Ts = parse_grid("1:200:6"), parse_grid("5:2000:15")
        res = time_budget_sweep(logs, tes, Ts)
        for te in tes:
            vals = [c.winner_mean for c in res.cells if c.eval_time == te]
            assert all(b <= a for a, b in zip(vals, vals[1:]))
        for T in Ts:
            ms = [affordable_iterations(logs["a"][0].records.model_times, te, T) for te in tes]
            assert all(b <= a for a, b in zip(ms, ms[1:]))

    def test_deterministic(self):
        logs = random_logs(np.random.default_rng(1))
        a = time_budget_sweep(logs, [10, 50], [100, 1000])
        b = time_budget_sweep(logs, [10, 50], [100, 1000])
        assert a.cells == b.cells

    def test_ties_go_to_first_name(self):
        log = synthetic_log(np.zeros(5), [3.0, 2.0, 1.0, 1.0, 1.0])
        res = time_budget_sweep({"zeta": [log], "alpha": [log]}, [1.0], [3.0])
        assert res.cells[0].winner == "alpha" and res.cells[0].tie

    def test_invalid_when_cap_binds(self):
        log = synthetic_log(np.zeros(5), [3.0, 2.0, 1.0, 1.0, 1.0])
        res = time_budget_sweep({"a": [log]}, [1.0], [3.0, 100.0], reference_budget=5)
        assert [c.valid for c in res.cells] == [True, False]

    def test_parse_grid(self):
        np.testing.assert_allclose(parse_grid("10:1000:3"), [10, 100, 1000])
        with pytest.raises(ConfigError):
            parse_grid("10:1000")


class TestIO:
    def make_logs(self):
        rng = np.random.default_rng(0)
        logs = {}
        for name in ("gp", "rs"):
            logs[name] = {}
            for run_id in range(2):
                recs = [
                    EvaluationRecord(tuple(int(v) for v in rng.integers(-5, 5, 2)), float(rng.normal()) / 3,
                                     float(rng.exponential()), float(rng.exponential()) * 1e-7)
                    for _ in range(3)
                ]
                logs[name][run_id] = RunLog("c", run_id, EvaluationHistory(recs))
        return logs

    def test_runs_row_count_and_roundtrip(self, tmp_path):
        logs = self.make_logs()
        write_runs_csv(tmp_path / "runs.csv", logs)
        with open(tmp_path / "runs.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["strategy", "run_id", "iteration", "point", "observed", "best_so_far",
                           "model_time_s", "eval_time_s"]
        assert len(rows) == 13
        back = read_runs_csv(tmp_path / "runs.csv")
        for name in logs:
            for run_id, log in logs[name].items():
                assert list(back[name][run_id].records) == list(log.records)

    def test_aggregates_roundtrip(self, tmp_path):
        logs = self.make_logs()
        aggs = {n: aggregate_runs(n, list(runs.values())) for n, runs in logs.items()}
        write_aggregates_csv(tmp_path / "agg.csv", aggs)
        back = read_aggregates_csv(tmp_path / "agg.csv")
        for n, agg in aggs.items():
            assert np.array_equal(back[n].mean_best, agg.mean_best)
            assert np.array_equal(back[n].std_best, agg.std_best)
            assert np.array_equal(back[n].mean_cum_model_time, agg.mean_cum_model_time)

    def test_empty_sweep_is_header_only(self, tmp_path):
        res = time_budget_sweep({"a": [synthetic_log([0.0], [1.0])]}, [10.0], [5.0])
        write_sweep_csv(tmp_path / "sweep.csv", res)
        assert (tmp_path / "sweep.csv").read_text() == "eval_time_s,budget_s,winner,winner_mean_objective,valid\n"
        write_sweep_json(tmp_path / "sweep.json", res)
        assert json.loads((tmp_path / "sweep.json").read_text())["cells"] == []

    def test_unwritable_path_names_the_path(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(OSError, match="file"):
            write_runs_csv(blocker / "runs.csv", {})


class TestSurface:
    def test_corners(self):
        grid = surface_grid(Bounds((0, 0), (1, 1)), 1)
        assert grid.tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]

    def test_dimension_guard(self):
        with pytest.raises(ConfigError):
            surface_grid(Bounds.uniform(3, 0, 1), 4)

    def test_pl_grid_at_integer_nodes(self, rng):
        bounds = Bounds((0, 0), (4, 4))
        X = rng.integers(0, 5, size=(10, 2))
        model = pl_fit(X, rng.normal(size=10), bounds)
        rows = surface_export(model, bounds, 4)
        assert len(rows) == 25
        np.testing.assert_array_equal(rows[:, 2], model.predict(rows[:, :2]))

    def test_gp_grid_interpolates(self, tmp_path):
        bounds = Bounds((0, 0), (2, 2))
        X = np.array([[0, 0], [2, 2], [0, 2], [2, 0]])
        y = np.array([1.0, 5.0, -2.0, 3.0])
        model = gp_fit(X, y, 1.0, 1.0, 1e-12)
        rows = surface_export(model, bounds, 2)
        lookup = {(r[0], r[1]): r[2] for r in rows}
        for x, v in zip(X, y):
            assert lookup[tuple(float(c) for c in x)] == pytest.approx(v, abs=1e-6)
        write_surface_csv(tmp_path / "s.csv", rows)
        assert (tmp_path / "s.csv").read_text().splitlines()[0] == "x1,x2,model_value"
