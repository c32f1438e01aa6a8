from .experiment import (
    AggregateSeries,
    ExperimentConfig,
    ExperimentResult,
    aggregate_runs,
    build_problem,
    derive_seed,
    run_experiment,
)
from .io import (
    read_aggregates_csv,
    read_runs_csv,
    write_aggregates_csv,
    write_experiment,
    write_runs_csv,
    write_surface_csv,
    write_sweep_csv,
    write_sweep_json,
)
from .surface import surface_export, surface_grid
from .sweep import SweepCell, SweepResult, affordable_iterations, parse_grid, time_budget_sweep

__all__ = [
    "AggregateSeries",
    "ExperimentConfig",
    "ExperimentResult",
    "SweepCell",
    "SweepResult",
    "affordable_iterations",
    "aggregate_runs",
    "build_problem",
    "derive_seed",
    "parse_grid",
    "read_aggregates_csv",
    "read_runs_csv",
    "run_experiment",
    "surface_export",
    "surface_grid",
    "time_budget_sweep",
    "write_aggregates_csv",
    "write_experiment",
    "write_runs_csv",
    "write_surface_csv",
    "write_sweep_csv",
    "write_sweep_json",
]
