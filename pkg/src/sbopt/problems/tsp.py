"""Perturbed asymmetric TSP with the sequential selection encoding.

City 0 is the fixed origin. Decision ``x_i`` (1-based) picks the ``x_i``-th
city, in ascending order, among those not yet visited; the last remaining
city closes the tour.
"""

from dataclasses import dataclass, field

import numpy as np

from ..core import Bounds
from ..exceptions import ConfigError
from .base import Problem


@dataclass(frozen=True)
class ATSPInstance:
    matrix: np.ndarray
    name: str = field(default="")

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ConfigError("distance matrix must be square")
        if m.shape[0] < 1:
            raise ConfigError("an instance needs at least one city")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_cities(self):
        return self.matrix.shape[0]


def encoding_bounds(k):
    """Bounds of the encoding for ``k`` cities: ``x_i`` in ``{1, ..., k - i}``."""
    if k < 3:
        raise ConfigError("the sequential encoding needs at least three cities")
    d = k - 2
    return Bounds((1,) * d, tuple(k - i for i in range(1, d + 1)))


def tsp_decode(encoding, k):
    """Tour as a list of ``k`` cities starting at the origin 0."""
    x = np.asarray(encoding)
    if x.shape != (k - 2,):
        raise ConfigError(f"encoding for {k} cities must have length {k - 2}")
    remaining = list(range(1, k))
    tour = [0]
    for i, choice in enumerate(x, start=1):
        choice = int(choice)
        if not 1 <= choice <= len(remaining):
            raise ConfigError(f"x_{i} = {choice} outside 1..{len(remaining)}")
        tour.append(remaining.pop(choice - 1))
    tour.extend(remaining)
    return tour


def tour_arcs(tour):
    tour = np.asarray(tour)
    return tour, np.roll(tour, -1)


def tour_length(matrix, tour):
    src, dst = tour_arcs(tour)
    return float(np.asarray(matrix)[src, dst].sum())


def tsp_eval(instance, encoding, rng, repetitions=100, noise=True):
    """Worst of ``repetitions`` tour lengths, each arc perturbed by fresh U(0, 1)."""
    tour = tsp_decode(encoding, instance.n_cities)
    base = tour_length(instance.matrix, tour)
    if not noise:
        return base
    perturb = rng.uniform(0.0, 1.0, size=(repetitions, len(tour)))
    return float(np.max(base + perturb.sum(axis=1)))


class PerturbedTSP(Problem):
    name = "tsp"

    def __init__(self, instance, repetitions=100, noise=True):
        self.instance = instance
        self.repetitions = repetitions
        self.noise = noise
        self.bounds = encoding_bounds(instance.n_cities)

    def evaluate(self, x, rng):
        return tsp_eval(self.instance, self._check(x), rng, self.repetitions, self.noise)
