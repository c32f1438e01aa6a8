import numpy as np

from ..core import Bounds
from ..exceptions import ConfigError
from .base import Problem


def rosenbrock(x):
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


class Rosenbrock(Problem):
    """Integer Rosenbrock with additive Gaussian noise (default sd ``1e-6``)."""

    name = "rosenbrock"

    def __init__(self, dim=49, lower=-5, upper=10, noise_std=1e-6):
        if dim < 2:
            raise ConfigError("Rosenbrock needs at least two dimensions")
        self.bounds = Bounds.uniform(dim, lower, upper)
        self.noise_std = noise_std

    def noiseless_evaluate(self, x):
        return rosenbrock(self._check(x))

    def evaluate(self, x, rng):
        value = self.noiseless_evaluate(x)
        if self.noise_std:
            value += rng.normal(0.0, self.noise_std)
        return value


def rosenbrock_eval(x, rng, noise_std=1e-6):
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] < 2:
        raise ConfigError("Rosenbrock needs at least two dimensions")
    value = rosenbrock(x)
    return value + rng.normal(0.0, noise_std) if noise_std else value
