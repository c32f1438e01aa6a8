"""Optimization strategies selectable by name: ``gp``, ``pl``, ``dr``, ``rs``."""

from ..exceptions import ConfigError
from .base import BaseStrategy, RandomSearch, random_suggest
from .density import DensityRatioStrategy, density_ratio_suggest
from .gp import (
    GaussianProcessSurrogate,
    GPStrategy,
    gp_fit,
    gp_predict,
    gp_suggest,
    matern52,
    ucb_acquisition,
)
from .relu import (
    PLStrategy,
    ReluBasis,
    ReluSurrogate,
    minimize_relu_model,
    pl_basis,
    pl_fit,
    pl_suggest,
)

STRATEGIES = {
    "gp": GPStrategy,
    "pl": PLStrategy,
    "dr": DensityRatioStrategy,
    "rs": RandomSearch,
}


def make_strategy(name, **params):
    try:
        cls = STRATEGIES[name]
    except KeyError:
        raise ConfigError(f"unknown strategy {name!r}; choose from {sorted(STRATEGIES)}") from None
    return cls(**params)


__all__ = [
    "BaseStrategy",
    "DensityRatioStrategy",
    "GPStrategy",
    "GaussianProcessSurrogate",
    "PLStrategy",
    "RandomSearch",
    "ReluBasis",
    "ReluSurrogate",
    "STRATEGIES",
    "density_ratio_suggest",
    "gp_fit",
    "gp_predict",
    "gp_suggest",
    "make_strategy",
    "matern52",
    "minimize_relu_model",
    "pl_basis",
    "pl_fit",
    "pl_suggest",
    "random_suggest",
    "ucb_acquisition",
]
