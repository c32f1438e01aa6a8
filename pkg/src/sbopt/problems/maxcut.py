from dataclasses import dataclass

import numpy as np

from ..core import Bounds
from ..exceptions import ConfigError
from .base import Problem

BRUTEFORCE_MAX_NODES = 24


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph on nodes ``0..n-1`` with non-negative edge weights.

    ``edges`` maps ``(i, j)`` with ``i < j`` to the weight.
    """

    n: int
    edges: dict

    def __post_init__(self):
        clean = {}
        for (i, j), w in self.edges.items():
            if i == j:
                raise ConfigError("self-loops are not allowed")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ConfigError(f"edge ({i}, {j}) out of range")
            if w < 0:
                raise ConfigError("edge weights must be non-negative")
            key = (min(i, j), max(i, j))
            if key in clean and clean[key] != w:
                raise ConfigError(f"conflicting weights for edge {key}")
            clean[key] = float(w)
        object.__setattr__(self, "edges", dict(sorted(clean.items())))

    @property
    def n_edges(self):
        return len(self.edges)

    def weight_matrix(self):
        W = np.zeros((self.n, self.n))
        for (i, j), w in self.edges.items():
            W[i, j] = W[j, i] = w
        return W


def graph_seed(master_seed, n):
    """Seed for the graph of size ``n``; shared by every run and algorithm."""
    return np.random.SeedSequence([int(master_seed), int(n)])


def maxcut_generate(n, edge_probability=0.5, max_weight=10.0, seed=0):
    if n < 2:
        raise ConfigError("a Max-Cut graph needs at least two nodes")
    if not 0.0 <= edge_probability <= 1.0:
        raise ConfigError("edge_probability must lie in [0, 1]")
    rng = np.random.default_rng(graph_seed(seed, n))
    iu, ju = np.triu_indices(n, k=1)
    present = rng.random(iu.size) < edge_probability
    weights = rng.uniform(0.0, max_weight, size=iu.size)
    edges = {(int(i), int(j)): float(w) for i, j, w, p in zip(iu, ju, weights, present) if p}
    return WeightedGraph(n, edges)


def cut_weight(graph, x):
    x = np.asarray(x)
    return float(sum(w for (i, j), w in graph.edges.items() if x[i] != x[j]))


def _check_binary(graph, x):
    x = np.asarray(x)
    if x.shape != (graph.n,):
        raise ConfigError(f"expected a bitstring of length {graph.n}")
    if not np.all((x == 0) | (x == 1)):
        raise ConfigError("Max-Cut points must be binary")
    return x.astype(np.int64)


def maxcut_eval(graph, x, rng, noise_std=1.0):
    """Negated cut weight plus Gaussian noise (minimization convention)."""
    value = -cut_weight(graph, _check_binary(graph, x))
    return value + rng.normal(0.0, noise_std) if noise_std else value


def maxcut_bruteforce(graph, chunk=1 << 16):
    """Exact maximum cut by enumeration; returns ``(weight, bits)``.

    Assignments are scanned in lexicographic order and the first maximizer
    is kept.
    """
    if graph.n > BRUTEFORCE_MAX_NODES:
        raise ConfigError(f"brute force limited to {BRUTEFORCE_MAX_NODES} nodes")
    n = graph.n
    W = graph.weight_matrix()
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    best, witness = -np.inf, None
    for start in range(0, 1 << n, chunk):
        codes = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        X = ((codes[:, None] >> shifts) & 1).astype(float)
        cuts = np.einsum("ki,ij,kj->k", X, W, 1.0 - X)
        k = int(np.argmax(cuts))
        if cuts[k] > best:
            best, witness = float(cuts[k]), X[k].astype(np.int64)
    return best, witness


class MaxCut(Problem):
    name = "maxcut"

    def __init__(self, graph, noise_std=1.0):
        self.graph = graph
        self.noise_std = noise_std
        self.bounds = Bounds.uniform(graph.n, 0, 1)
        self._W = graph.weight_matrix()

    @classmethod
    def random(cls, n=150, edge_probability=0.5, max_weight=10.0, seed=0, noise_std=1.0):
        return cls(maxcut_generate(n, edge_probability, max_weight, seed), noise_std=noise_std)

    def noiseless_evaluate(self, x):
        x = _check_binary(self.graph, x)
        diff = x[:, None] != x[None, :]
        return -0.5 * float(np.sum(self._W[diff]))

    def evaluate(self, x, rng):
        value = self.noiseless_evaluate(x)
        return value + rng.normal(0.0, self.noise_std) if self.noise_std else value
