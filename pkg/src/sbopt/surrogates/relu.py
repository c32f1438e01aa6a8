"""Piecewise-linear surrogate built from rectified linear units.

Every unit is ``max(0, x_i - z)`` or ``max(0, x_i + x_{i+1} - z)`` with an
integer knot ``z``. All kink hyperplanes therefore come from an interval
matrix, so the local minima of the fitted model sit on the integer lattice
and the model itself can serve as the acquisition function.
"""

import numpy as np
from scipy.linalg import LinAlgError, solve
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ..exceptions import ConfigError, NumericalFailure
from .base import BaseStrategy

_PRE_TOL = 1e-9


class ReluBasis(TransformerMixin, BaseEstimator):
    """Feature map onto the ReLU units for a given box.

    Column 0 is the constant unit; the remaining columns follow
    ``first_``, ``second_`` (``-1`` for single-variable units) and ``knot_``.
    """

    def __init__(self, bounds=None):
        self.bounds = bounds

    def fit(self, X=None, y=None):
        if self.bounds is None:
            raise ConfigError("ReluBasis needs bounds")
        lo, hi = self.bounds.lower_array, self.bounds.upper_array
        first, second, knot = [], [], []
        for i in range(self.bounds.dim):
            z = np.arange(lo[i], hi[i] + 1)
            first.append(np.full(z.size, i))
            second.append(np.full(z.size, -1))
            knot.append(z)
        for i in range(self.bounds.dim - 1):
            z = np.arange(lo[i] + lo[i + 1], hi[i] + hi[i + 1] + 1)
            first.append(np.full(z.size, i))
            second.append(np.full(z.size, i + 1))
            knot.append(z)
        self.first_ = np.concatenate(first).astype(np.int64)
        self.second_ = np.concatenate(second).astype(np.int64)
        self.knot_ = np.concatenate(knot).astype(float)
        self.n_units_ = self.first_.size + 1
        return self

    def preactivation(self, X):
        X = np.asarray(X, dtype=float)
        pre = X[:, self.first_] - self.knot_
        paired = self.second_ >= 0
        pre[:, paired] += X[:, self.second_[paired]]
        return pre

    def transform(self, X):
        check_is_fitted(self, "first_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.bounds.dim:
            raise ConfigError(f"expected {self.bounds.dim} features, got {X.shape[1]}")
        return np.hstack([np.ones((X.shape[0], 1)), np.maximum(self.preactivation(X), 0.0)])

    def coefficient_matrix(self):
        """Dense ``(n_units - 1, d)`` matrix of the unit coefficient vectors."""
        check_is_fitted(self, "first_")
        A = np.zeros((self.first_.size, self.bounds.dim), dtype=np.int64)
        rows = np.arange(self.first_.size)
        A[rows, self.first_] = 1
        paired = self.second_ >= 0
        A[rows[paired], self.second_[paired]] = 1
        return A


def pl_basis(bounds):
    return ReluBasis(bounds).fit()


class ReluSurrogate(RegressorMixin, BaseEstimator):
    """Ridge-regularized linear combination of ReLU units.

    The weights minimize ``sum (M(x_m) - y_m)^2 + alpha * ||w||^2``; when there
    are fewer observations than units the equivalent dual system is solved.
    """

    def __init__(self, bounds=None, alpha=1e-3):
        self.bounds = bounds
        self.alpha = alpha

    def fit(self, X, y):
        if not self.alpha > 0:
            raise ConfigError("alpha must be positive")
        self.basis_ = pl_basis(self.bounds)
        Phi = self.basis_.transform(X)
        y = np.asarray(y, dtype=float)
        m, p = Phi.shape
        try:
            if m <= p:
                G = Phi @ Phi.T
                G[np.diag_indices_from(G)] += self.alpha
                self.coef_ = Phi.T @ solve(G, y, assume_a="pos", check_finite=False)
            else:
                A = Phi.T @ Phi
                A[np.diag_indices_from(A)] += self.alpha
                self.coef_ = solve(A, Phi.T @ y, assume_a="pos", check_finite=False)
        except LinAlgError as exc:
            raise NumericalFailure(f"ridge normal equations are singular: {exc}") from exc
        if not np.all(np.isfinite(self.coef_)):
            raise NumericalFailure("ridge solve produced non-finite weights")
        return self

    @property
    def intercept_(self):
        return self.coef_[0]

    @property
    def unit_weights_(self):
        return self.coef_[1:]

    def predict(self, X):
        check_is_fitted(self, "coef_")
        return self.basis_.transform(X) @ self.coef_

    def lipschitz_constant(self):
        A = self.basis_.coefficient_matrix()
        return float(np.sum(np.abs(self.unit_weights_) * np.linalg.norm(A, axis=1)))


def pl_fit(X, y, bounds, alpha=1e-3):
    return ReluSurrogate(bounds=bounds, alpha=alpha).fit(X, y)


class _LatticeSearch:
    """Exact local minimization of a fitted :class:`ReluSurrogate` in its box.

    Moves are exact line minimizations along coordinate directions and along
    alternating chains ``+-(e_i - e_{i+1} + e_{i+2} - ...)``. The chains are the
    extreme rays of the cones cut out by the kink hyperplanes, so a point where
    no chain or coordinate direction descends is a local minimum.
    """

    def __init__(self, model):
        basis = model.basis_
        self.first = basis.first_
        self.second = basis.second_
        self.knot = basis.knot_
        self.w = model.unit_weights_
        self.paired = self.second >= 0
        self.lo = model.bounds.lower_array.astype(float)
        self.hi = model.bounds.upper_array.astype(float)
        self.d = model.bounds.dim
        self.intercept = float(model.intercept_)
        self.single_idx = np.flatnonzero(~self.paired)
        self.pair_idx = np.flatnonzero(self.paired)

    def value(self, x):
        return self.intercept + float(self.w @ np.maximum(self._pre(x), 0.0))

    def _pre(self, x):
        pre = x[self.first] - self.knot
        pre[self.paired] += x[self.second[self.paired]]
        return pre

    def _direction_coeff(self, r):
        s = r[self.first].copy()
        s[self.paired] += r[self.second[self.paired]]
        return s

    def line_search(self, x, pre, r, scale):
        """Best step ``t`` along ``r``; returns ``(t, change)`` with ``change < 0``
        only for a strict improvement."""
        up = r > 0
        down = r < 0
        room = np.concatenate([(self.hi - x)[up] / r[up], (self.lo - x)[down] / r[down]])
        t_max = float(room.min()) if room.size else 0.0
        if t_max <= _PRE_TOL:
            return 0.0, 0.0
        s = self._direction_coeff(r)
        moving = s != 0
        p, s, w = pre[moving], s[moving], self.w[moving]
        on = (p > _PRE_TOL) | ((np.abs(p) <= _PRE_TOL) & (s > 0))
        slope0 = float(np.sum(w[on] * s[on]))
        t_break = -p / s
        inside = (t_break > _PRE_TOL) & (t_break < t_max - _PRE_TOL)
        t_break, jumps = t_break[inside], (w * np.abs(s))[inside]
        order = np.argsort(t_break, kind="stable")
        t_pts = np.append(t_break[order], t_max)
        slopes = slope0 + np.concatenate([[0.0], np.cumsum(jumps[order])])
        values = np.cumsum(slopes * np.diff(np.concatenate([[0.0], t_pts])))
        k = int(np.argmin(values))
        if values[k] < -1e-10 * scale:
            return float(t_pts[k]), float(values[k])
        return 0.0, 0.0

    def chain_slopes(self, x, pre):
        """Directional derivatives along every feasible chain; returns the
        steepest ``(slope, direction)`` or ``(0, None)``."""
        d = self.d
        single, pair = self.single_idx, self.pair_idx
        ps, pp = pre[single], pre[pair]
        # contribution of each unit for direction coefficient +1 / -1
        s_plus, s_minus = self.w[single] * (ps >= -_PRE_TOL), -self.w[single] * (ps > _PRE_TOL)
        p_plus, p_minus = self.w[pair] * (pp >= -_PRE_TOL), -self.w[pair] * (pp > _PRE_TOL)
        gS = np.stack(
            [np.bincount(self.first[single], s_minus, d), np.bincount(self.first[single], s_plus, d)]
        )
        gP = np.zeros((2, d + 1))
        if d > 1:
            gP[0, 1:d] = np.bincount(self.first[pair], p_minus, d - 1)
            gP[1, 1:d] = np.bincount(self.first[pair], p_plus, d - 1)
        # gP[:, c + 1] holds the pair (c, c + 1); index 0 and d are empty ends
        alt = np.where(np.arange(d) % 2 == 0, 1, -1)
        best_slope, best_dir = 0.0, None
        ii, jj = np.triu_indices(d)
        for tau in (1, -1):
            sign = tau * alt
            sel = (sign > 0).astype(int)
            H = np.concatenate([[0.0], np.cumsum(gS[sel, np.arange(d)])])
            blocked = ((sign > 0) & (x >= self.hi - _PRE_TOL)) | ((sign < 0) & (x <= self.lo + _PRE_TOL))
            B = np.concatenate([[0], np.cumsum(blocked)])
            slope = H[jj + 1] - H[ii] + gP[sel[ii], ii] + gP[sel[jj], jj + 1]
            feasible = (B[jj + 1] - B[ii]) == 0
            norm = np.sqrt(jj - ii + 1.0)
            score = np.where(feasible, slope / norm, np.inf)
            k = int(np.argmin(score))
            if score[k] < best_slope:
                best_slope = float(score[k])
                r = np.zeros(d)
                r[ii[k] : jj[k] + 1] = sign[ii[k] : jj[k] + 1]
                best_dir = r
        return best_slope, best_dir

    def _move(self, x, pre, r, t):
        x = x + t * r
        snapped = np.rint(x)
        close = np.abs(x - snapped) < 1e-9
        x[close] = snapped[close]
        x = np.clip(x, self.lo, self.hi)
        return x, self._pre(x)

    def run(self, x0, max_moves=None):
        x = np.clip(np.asarray(x0, dtype=float), self.lo, self.hi)
        pre = self._pre(x)
        scale = 1.0 + float(np.sum(np.abs(self.w))) * (1.0 + float(np.max(np.abs(self.hi - self.lo))))
        max_moves = max_moves or 200 * self.d + 1000
        moves = 0
        while moves < max_moves:
            improved = True
            while improved and moves < max_moves:
                improved = False
                for i in range(self.d):
                    best = (0.0, 0.0, None)
                    for sgn in (1.0, -1.0):
                        r = np.zeros(self.d)
                        r[i] = sgn
                        t, change = self.line_search(x, pre, r, scale)
                        if change < best[1]:
                            best = (t, change, r)
                    if best[2] is not None:
                        x, pre = self._move(x, pre, best[2], best[0])
                        moves += 1
                        improved = True
            slope, r = self.chain_slopes(x, pre)
            if r is None or slope >= -1e-12 * scale:
                break
            t, change = self.line_search(x, pre, r, scale)
            if change >= 0:
                break
            x, pre = self._move(x, pre, r, t)
            moves += 1
        return x


def minimize_relu_model(model, start):
    """Local minimizer of the fitted model in its box, starting from ``start``."""
    check_is_fitted(model, "coef_")
    return _LatticeSearch(model).run(start)


def pl_suggest(model, bounds, best_point, rng, p_explore=None):
    """Minimize the model from ``best_point``, round, then flip each coordinate
    by +-1 with probability ``p_explore`` (default ``1/d``) and clamp."""
    d = bounds.dim
    if p_explore is None:
        p_explore = 1.0 / d
    x = np.rint(minimize_relu_model(model, best_point)).astype(np.int64)
    flip = rng.random(d) < p_explore
    step = rng.choice(np.array([-1, 1]), size=d)
    x = x + np.where(flip, step, 0)
    return bounds.clip(x)


class PLStrategy(BaseStrategy):
    """ReLU surrogate used directly as the acquisition, plus random +-1 flips."""

    def __init__(self, bounds=None, random_state=None, initial_design_size=5, alpha=1e-3, p_explore=None):
        self.bounds = bounds
        self.random_state = random_state
        self.initial_design_size = initial_design_size
        self.alpha = alpha
        self.p_explore = p_explore

    def _fit(self, X, y):
        self.model_ = ReluSurrogate(bounds=self.bounds, alpha=self.alpha).fit(X, y)

    def _suggest(self):
        return pl_suggest(self.model_, self.bounds, self.best_point(), self._rng(), self.p_explore)

    def predict(self, X):
        check_is_fitted(self, "model_")
        return self.model_.predict(X)
