"""Per-dimension density-ratio baseline.

Each coordinate gets two smoothed categorical densities, one over the best
``gamma`` fraction of the observations and one over the rest. Candidates are
drawn from the product of the "good" densities and the one with the largest
summed log ratio is proposed. No interaction between coordinates is modelled.
"""

import numpy as np
from sklearn.utils.validation import check_is_fitted

from .base import BaseStrategy

_LOG_FLOOR = 1e-300


def split_good_bad(y, gamma):
    """Indices of the good (``y <= gamma``-quantile) and bad observations.

    With no observation above the threshold the bad set falls back to all
    observations, so identical values give identical densities.
    """
    y = np.asarray(y, dtype=float)
    threshold = np.quantile(y, gamma)
    good = np.flatnonzero(y <= threshold)
    bad = np.flatnonzero(y > threshold)
    if bad.size == 0:
        bad = np.arange(y.size)
    return good, bad


def categorical_densities(X, bounds, smoothing):
    """List of per-dimension probability vectors over ``{l_i, ..., u_i}``."""
    out = []
    for i in range(bounds.dim):
        size = bounds.upper[i] - bounds.lower[i] + 1
        counts = np.bincount(X[:, i] - bounds.lower[i], minlength=size).astype(float)
        counts += smoothing
        total = counts.sum()
        out.append(counts / total if total > 0 else np.full(size, 1.0 / size))
    return out


def density_ratio_suggest(X, y, bounds, rng, gamma=0.25, smoothing=1.0, n_candidates=24):
    X = np.asarray(X, dtype=np.int64)
    good, bad = split_good_bad(y, gamma)
    g = categorical_densities(X[good], bounds, smoothing)
    b = categorical_densities(X[bad], bounds, smoothing)
    cands = np.empty((n_candidates, bounds.dim), dtype=np.int64)
    score = np.zeros(n_candidates)
    for i in range(bounds.dim):
        idx = rng.choice(g[i].size, size=n_candidates, p=g[i])
        cands[:, i] = bounds.lower[i] + idx
        score += np.log(np.maximum(g[i][idx], _LOG_FLOOR)) - np.log(np.maximum(b[i][idx], _LOG_FLOOR))
    return cands[int(np.argmax(score))]


class DensityRatioStrategy(BaseStrategy):
    def __init__(
        self,
        bounds=None,
        random_state=None,
        initial_design_size=3,
        gamma=0.25,
        smoothing=1.0,
        n_candidates=24,
    ):
        self.bounds = bounds
        self.random_state = random_state
        self.initial_design_size = initial_design_size
        self.gamma = gamma
        self.smoothing = smoothing
        self.n_candidates = n_candidates

    def _fit(self, X, y):
        self.fitted_ = True

    def _suggest(self):
        check_is_fitted(self, "fitted_")
        return density_ratio_suggest(
            self.X_, self.y_, self.bounds, self._rng(), self.gamma, self.smoothing, self.n_candidates
        )
