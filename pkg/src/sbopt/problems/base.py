import numpy as np

from ..validation import check_point


class Problem:
    """Black-box objective over an integer box, minimized.

    Subclasses set ``bounds`` and implement ``evaluate(x, rng)``; those with a
    deterministic part also implement ``noiseless_evaluate(x)``.
    """

    bounds = None
    name = "problem"

    def evaluate(self, x, rng):
        raise NotImplementedError

    def noiseless_evaluate(self, x):
        raise NotImplementedError(f"{type(self).__name__} has no noiseless form")

    def _check(self, x):
        return check_point(self.bounds, x)

    @property
    def dim(self):
        return self.bounds.dim


class FunctionProblem(Problem):
    """Wrap a plain ``f(x) -> float`` as a noiseless problem."""

    def __init__(self, func, bounds, name="function"):
        self.func = func
        self.bounds = bounds
        self.name = name

    def noiseless_evaluate(self, x):
        return float(self.func(self._check(x)))

    def evaluate(self, x, rng):
        return self.noiseless_evaluate(x)
