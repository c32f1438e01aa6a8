"""Gaussian-process surrogate with a Matern 5/2 kernel and a confidence-bound
acquisition that is optimized in the continuous box and rounded only when a
point is handed to the objective."""

import math

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ..exceptions import ConfigError, NumericalFailure
from ..validation import as_generator
from .base import BaseStrategy

SQRT5 = math.sqrt(5.0)
JITTER_START = 1e-10
JITTER_MAX = 1e-4


def matern52(r, length_scale, variance):
    """Matern 5/2 covariance as a function of Euclidean distance ``r``."""
    r = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(r)) or not math.isfinite(length_scale) or not math.isfinite(variance):
        raise ValueError("matern52 inputs must be finite")
    if np.any(r < 0):
        raise ValueError("distance must be non-negative")
    if length_scale <= 0 or variance <= 0:
        raise ValueError("length_scale and variance must be positive")
    s = SQRT5 * r / length_scale
    out = variance * (1.0 + s + s * s / 3.0) * np.exp(-s)
    return float(out) if out.ndim == 0 else out


def _scaled_distance(X1, X2, length_scale):
    return SQRT5 * cdist(X1, X2) / length_scale


def jittered_cholesky(K, noise_variance):
    """Cholesky of ``K + (noise + jitter) I`` with escalating jitter.

    Returns ``(L, jitter)``; raises :class:`NumericalFailure` once the jitter
    would exceed ``JITTER_MAX``.
    """
    n = K.shape[0]
    jitter = JITTER_START
    while jitter <= JITTER_MAX * (1 + 1e-9):
        try:
            L = cholesky(K + (noise_variance + jitter) * np.eye(n), lower=True, check_finite=False)
            if np.all(np.isfinite(L)):
                return L, jitter
        except np.linalg.LinAlgError:
            pass
        jitter *= 10.0
    raise NumericalFailure("Cholesky failed even with maximal jitter")


class GaussianProcessSurrogate(RegressorMixin, BaseEstimator):
    """Exact GP regression with an isotropic Matern 5/2 kernel.

    Targets are standardized to zero mean and unit variance before fitting;
    ``signal_variance`` and ``noise_variance`` live on that standardized scale.
    When ``optimizer="lbfgs"``, the three hyperparameters are set by maximizing
    the log marginal likelihood from the initial values plus ``n_restarts``
    log-uniform random starts.

    Parameters
    ----------
    length_scale : float
    signal_variance : float
    noise_variance : float
    optimizer : {"lbfgs", None}
    n_restarts : int
    length_scale_bounds, signal_variance_bounds, noise_variance_bounds : pair of float
        Box for the hyperparameter search.
    random_state : int, Generator or None
        Source of the random restarts.
    """

    def __init__(
        self,
        length_scale=1.0,
        signal_variance=1.0,
        noise_variance=1e-4,
        optimizer=None,
        n_restarts=2,
        length_scale_bounds=(1e-2, 1e3),
        signal_variance_bounds=(1e-2, 1e2),
        noise_variance_bounds=(1e-8, 1.0),
        random_state=None,
    ):
        self.length_scale = length_scale
        self.signal_variance = signal_variance
        self.noise_variance = noise_variance
        self.optimizer = optimizer
        self.n_restarts = n_restarts
        self.length_scale_bounds = length_scale_bounds
        self.signal_variance_bounds = signal_variance_bounds
        self.noise_variance_bounds = noise_variance_bounds
        self.random_state = random_state

    def _theta_bounds(self):
        return np.log(
            [self.signal_variance_bounds, self.length_scale_bounds, self.noise_variance_bounds]
        )

    def log_marginal_likelihood(self, theta, eval_gradient=False):
        """LML of the standardized training targets at log-hyperparameters
        ``theta = log([signal_variance, length_scale, noise_variance])``."""
        check_is_fitted(self, "X_train_")
        sf2, ell, sn2 = np.exp(theta)
        S = _scaled_distance(self.X_train_, self.X_train_, ell)
        E = np.exp(-S)
        Kf = sf2 * (1.0 + S + S * S / 3.0) * E
        L, jitter = jittered_cholesky(Kf, sn2)
        y = self.y_train_
        alpha = cho_solve((L, True), y, check_finite=False)
        n = y.shape[0]
        lml = -0.5 * y @ alpha - np.log(np.diag(L)).sum() - 0.5 * n * math.log(2 * math.pi)
        if not eval_gradient:
            return lml
        W = np.outer(alpha, alpha) - cho_solve((L, True), np.eye(n), check_finite=False)
        dK_ell = sf2 * S * S * (1.0 + S) / 3.0 * E
        grad = 0.5 * np.array(
            [np.sum(W * Kf), np.sum(W * dK_ell), sn2 * np.trace(W)]
        )
        return lml, grad

    def fit(self, X, y):
        X = check_array(X, dtype=float)
        y = np.asarray(y, dtype=float).ravel()
        if X.shape[0] != y.shape[0]:
            raise ConfigError("X and y have different numbers of rows")
        self.y_mean_ = float(y.mean())
        std = float(y.std())
        self.y_std_ = std if std > 0 and math.isfinite(std) else 1.0
        self.X_train_ = X
        self.y_train_ = (y - self.y_mean_) / self.y_std_
        theta = np.log([self.signal_variance, self.length_scale, self.noise_variance])
        if self.optimizer == "lbfgs":
            theta = self._optimize_theta(theta)
        elif self.optimizer is not None:
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")
        self._set_state(theta)
        return self

    def _optimize_theta(self, theta0):
        bounds = self._theta_bounds()
        rng = as_generator(self.random_state)
        starts = [np.clip(theta0, bounds[:, 0], bounds[:, 1])]
        for _ in range(self.n_restarts):
            starts.append(rng.uniform(bounds[:, 0], bounds[:, 1]))

        def objective(theta):
            try:
                lml, grad = self.log_marginal_likelihood(theta, eval_gradient=True)
            except NumericalFailure:
                return 1e25, np.zeros_like(theta)
            return -lml, -grad

        best_theta, best_val = starts[0], np.inf
        for start in starts:
            res = minimize(objective, start, jac=True, method="L-BFGS-B", bounds=bounds)
            if np.isfinite(res.fun) and res.fun < best_val:
                best_theta, best_val = res.x, res.fun
        return best_theta

    def _set_state(self, theta):
        self.theta_ = np.asarray(theta, dtype=float)
        sf2, ell, sn2 = np.exp(self.theta_)
        self.signal_variance_, self.length_scale_, self.noise_variance_ = sf2, ell, sn2
        K = matern52(cdist(self.X_train_, self.X_train_), ell, sf2)
        K = np.atleast_2d(K)
        self.L_, self.jitter_ = jittered_cholesky(K, sn2)
        self.alpha_ = cho_solve((self.L_, True), self.y_train_, check_finite=False)

    def predict_standardized(self, X):
        """Posterior mean and variance on the standardized target scale."""
        check_is_fitted(self, "L_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.X_train_.shape[1]:
            raise ConfigError(
                f"expected {self.X_train_.shape[1]} features, got {X.shape[1]}"
            )
        Ks = np.atleast_2d(matern52(cdist(X, self.X_train_), self.length_scale_, self.signal_variance_))
        mean = Ks @ self.alpha_
        V = solve_triangular(self.L_, Ks.T, lower=True, check_finite=False)
        var = self.signal_variance_ - np.einsum("ij,ij->j", V, V)
        return mean, np.maximum(var, 0.0)

    def predict(self, X, return_std=False):
        mean, var = self.predict_standardized(X)
        mean = self.y_mean_ + self.y_std_ * mean
        if return_std:
            return mean, self.y_std_ * np.sqrt(var)
        return mean

    def predict_var(self, X):
        return self.predict_standardized(X)[1] * self.y_std_**2


def gp_fit(X, y, length_scale, signal_variance, noise_variance):
    """Fit a GP with fixed hyperparameters."""
    return GaussianProcessSurrogate(
        length_scale=length_scale,
        signal_variance=signal_variance,
        noise_variance=noise_variance,
        optimizer=None,
    ).fit(X, y)


def gp_predict(model, x):
    """Posterior ``(mean, variance)`` at a single point, on the target scale."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ConfigError("gp_predict expects a single point")
    mean, std = model.predict(x[None, :], return_std=True)
    return float(mean[0]), float(std[0] ** 2)


def ucb_acquisition(model, x, kappa):
    """Confidence bound for minimization, ``-mu(x) + kappa * sigma(x)``,
    on the standardized scale, together with its gradient in ``x``."""
    x = np.asarray(x, dtype=float)
    diff = x[None, :] - model.X_train_
    r = np.sqrt(np.sum(diff * diff, axis=1))
    ell, sf2 = model.length_scale_, model.signal_variance_
    s = SQRT5 * r / ell
    e = np.exp(-s)
    k = sf2 * (1.0 + s + s * s / 3.0) * e
    J = -(sf2 * 5.0 / (3.0 * ell * ell) * (1.0 + s) * e)[:, None] * diff
    mu = k @ model.alpha_
    dmu = J.T @ model.alpha_
    v = solve_triangular(model.L_, k, lower=True, check_finite=False)
    var = sf2 - v @ v
    if var > 1e-16:
        sigma = math.sqrt(var)
        w = solve_triangular(model.L_.T, v, lower=False, check_finite=False)
        dsigma = -(J.T @ w) / sigma
    else:
        sigma, dsigma = 0.0, np.zeros_like(x)
    return -mu + kappa * sigma, -dmu + kappa * dsigma


def maximize_acquisition(model, bounds, rng, kappa, best_point=None, n_random_starts=None):
    """Multi-start L-BFGS-B on the confidence bound; returns the continuous maximizer."""
    d = bounds.dim
    if n_random_starts is None:
        n_random_starts = 1 + min(10, d)
    lo = bounds.lower_array.astype(float)
    hi = bounds.upper_array.astype(float)
    starts = [] if best_point is None else [np.asarray(best_point, dtype=float)]
    starts.extend(rng.uniform(lo, hi) for _ in range(n_random_starts))
    box = bounds.as_float_pairs()

    def neg(x):
        val, grad = ucb_acquisition(model, x, kappa)
        return -val, -grad

    best_x, best_val = None, -np.inf
    for start in starts:
        res = minimize(neg, np.clip(start, lo, hi), jac=True, method="L-BFGS-B", bounds=box)
        x = np.clip(res.x, lo, hi)
        val = ucb_acquisition(model, x, kappa)[0]
        if np.isfinite(val) and val > best_val:
            best_x, best_val = x, val
    if best_x is None:
        raise NumericalFailure("acquisition optimization produced no finite value")
    return best_x


def gp_suggest(model, bounds, rng, kappa=2.576, best_point=None, n_random_starts=None):
    """Maximize the confidence bound in the box, then round and clamp."""
    x = maximize_acquisition(model, bounds, rng, kappa, best_point, n_random_starts)
    return bounds.clip(np.rint(x).astype(np.int64))


class GPStrategy(BaseStrategy):
    """Bayesian optimization with a GP surrogate and a confidence-bound acquisition.

    Hyperparameters are re-optimized every iteration up to ``full_refit_until``
    observations and on every ``refit_every``-th iteration after that; in
    between, the previous values are reused.
    """

    def __init__(
        self,
        bounds=None,
        random_state=None,
        initial_design_size=5,
        kappa=2.576,
        noise_variance=1e-4,
        optimize_hyperparameters=True,
        n_restarts=2,
        full_refit_until=100,
        refit_every=5,
    ):
        self.bounds = bounds
        self.random_state = random_state
        self.initial_design_size = initial_design_size
        self.kappa = kappa
        self.noise_variance = noise_variance
        self.optimize_hyperparameters = optimize_hyperparameters
        self.n_restarts = n_restarts
        self.full_refit_until = full_refit_until
        self.refit_every = refit_every

    def _default_hyperparameters(self):
        mean_width = float(np.mean(self.bounds.widths))
        return {
            "length_scale": mean_width / 4.0 if mean_width > 0 else 1.0,
            "signal_variance": 1.0,
            "noise_variance": self.noise_variance,
        }

    def _fit(self, X, y):
        n = X.shape[0]
        params = getattr(self, "hyperparameters_", None) or self._default_hyperparameters()
        refit = self.optimize_hyperparameters and (
            getattr(self, "hyperparameters_", None) is None
            or n <= self.full_refit_until
            or n % self.refit_every == 0
        )
        diag = max(1.0, float(np.linalg.norm(self.bounds.widths)))
        self.model_ = GaussianProcessSurrogate(
            optimizer="lbfgs" if refit else None,
            n_restarts=self.n_restarts,
            length_scale_bounds=(0.1, 10.0 * diag),
            random_state=self._rng(),
            **params,
        ).fit(X, y)
        self.hyperparameters_ = {
            "length_scale": self.model_.length_scale_,
            "signal_variance": self.model_.signal_variance_,
            "noise_variance": self.model_.noise_variance_,
        }

    def _suggest(self):
        return gp_suggest(self.model_, self.bounds, self._rng(), self.kappa, self.best_point())

    def predict(self, X):
        check_is_fitted(self, "model_")
        return self.model_.predict(X)
