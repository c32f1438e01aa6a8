import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..core import uniform_sample
from ..exceptions import ConfigError
from ..validation import as_generator, check_int_array


class BaseStrategy(BaseEstimator):
    """Surrogate strategy: ``fit(X, y)`` on the history, then ``suggest()``.

    Subclasses implement ``_fit`` and ``_suggest``. Until ``initial_design_size``
    observations have been seen, ``suggest`` returns a uniform sample.
    The random stream is created on first use and survives refits, so a
    sequence of fit/suggest calls consumes one reproducible stream.
    """

    def _rng(self):
        if getattr(self, "rng_", None) is None:
            self.rng_ = as_generator(self.random_state)
        return self.rng_

    def _validate_bounds(self):
        if self.bounds is None:
            raise ConfigError(f"{type(self).__name__} needs bounds before fitting")
        return self.bounds

    def fit(self, X, y):
        bounds = self._validate_bounds()
        X = check_int_array(X, "X", ndim=2)
        y = np.asarray(y, dtype=float)
        if X.shape[0] != y.shape[0]:
            raise ConfigError("X and y have different numbers of rows")
        if X.shape[0] and X.shape[1] != bounds.dim:
            raise ConfigError(f"X has {X.shape[1]} columns, bounds have {bounds.dim}")
        if not np.all(np.isfinite(y)):
            raise ConfigError("y must be finite")
        self._rng()
        self.X_ = X
        self.y_ = y
        self.n_observations_ = X.shape[0]
        if self.n_observations_ >= max(1, self.initial_design_size):
            self._fit(X, y)
        return self

    def suggest(self):
        bounds = self._validate_bounds()
        rng = self._rng()
        if getattr(self, "n_observations_", 0) < max(1, self.initial_design_size):
            return uniform_sample(bounds, rng)
        x = np.asarray(self._suggest(), dtype=np.int64)
        return bounds.clip(x)

    def best_point(self):
        check_is_fitted(self, "X_")
        return self.X_[int(np.argmin(self.y_))]

    def predict(self, X):
        raise ConfigError(f"{type(self).__name__} has no pointwise surrogate model")

    def _fit(self, X, y):
        pass

    def _suggest(self):
        raise NotImplementedError


class RandomSearch(BaseStrategy):
    """Uniform random search baseline."""

    def __init__(self, bounds=None, random_state=None, initial_design_size=1):
        self.bounds = bounds
        self.random_state = random_state
        self.initial_design_size = initial_design_size

    def _suggest(self):
        return uniform_sample(self.bounds, self._rng())


def random_suggest(bounds, rng):
    return uniform_sample(bounds, rng)
