"""Surrogate-based optimization of expensive, noisy, integer-valued black boxes."""

from .core import (
    Bounds,
    BudgetSpec,
    EvaluationHistory,
    EvaluationRecord,
    RunLog,
    best_so_far,
    run_optimization,
    search_space_size,
    spawn_streams,
    uniform_sample,
)
from .exceptions import (
    ConfigError,
    EvaluationFailure,
    NumericalFailure,
    SbOptError,
    TsplibError,
)
from .surrogates import (
    DensityRatioStrategy,
    GPStrategy,
    PLStrategy,
    RandomSearch,
    make_strategy,
)

__version__ = "0.1.0"

__all__ = [
    "Bounds",
    "BudgetSpec",
    "ConfigError",
    "DensityRatioStrategy",
    "EvaluationFailure",
    "EvaluationHistory",
    "EvaluationRecord",
    "GPStrategy",
    "NumericalFailure",
    "PLStrategy",
    "RandomSearch",
    "RunLog",
    "SbOptError",
    "TsplibError",
    "best_so_far",
    "make_strategy",
    "run_optimization",
    "search_space_size",
    "spawn_streams",
    "uniform_sample",
]
