import numpy as np

from ..core import Bounds
from ..exceptions import ConfigError
from .base import Problem


class Binarized(Problem):
    """Re-encode every integer variable as a most-significant-bit-first group."""

    def __init__(self, inner):
        self.inner = inner
        widths = []
        for lo, up in zip(inner.bounds.lower, inner.bounds.upper):
            size = up - lo + 1
            if size & (size - 1):
                raise ConfigError(f"range size {size} is not a power of two")
            widths.append(size.bit_length() - 1)
        self.bits_per_var = tuple(widths)
        self.offsets = np.concatenate([[0], np.cumsum(widths)]).astype(np.int64)
        self.bounds = Bounds.uniform(int(self.offsets[-1]), 0, 1)
        self.name = f"binarized-{inner.name}"

    def decode(self, bits):
        bits = self._check(bits)
        out = np.empty(self.inner.bounds.dim, dtype=np.int64)
        for i, w in enumerate(self.bits_per_var):
            group = bits[self.offsets[i] : self.offsets[i + 1]]
            value = 0
            for b in group:
                value = (value << 1) | int(b)
            out[i] = self.inner.bounds.lower[i] + value
        return out

    def encode(self, x):
        x = np.asarray(x, dtype=np.int64) - self.inner.bounds.lower_array
        bits = []
        for v, w in zip(x, self.bits_per_var):
            bits.extend((int(v) >> (w - 1 - k)) & 1 for k in range(w))
        return np.array(bits, dtype=np.int64)

    def evaluate(self, x, rng):
        return self.inner.evaluate(self.decode(x), rng)

    def noiseless_evaluate(self, x):
        return self.inner.noiseless_evaluate(self.decode(x))


class Shuffled(Problem):
    """Fixed reordering of the input vector: ``inner(x[permutation])``."""

    def __init__(self, inner, seed=None, permutation=None):
        self.inner = inner
        d = inner.bounds.dim
        if permutation is None:
            permutation = np.random.default_rng(seed).permutation(d)
        permutation = np.asarray(permutation, dtype=np.int64)
        if sorted(permutation.tolist()) != list(range(d)):
            raise ConfigError("permutation must be a rearrangement of 0..d-1")
        self.permutation = permutation
        self.inverse = np.argsort(permutation)
        self.bounds = Bounds(
            tuple(inner.bounds.lower_array[self.inverse]),
            tuple(inner.bounds.upper_array[self.inverse]),
        )
        self.name = f"shuffled-{inner.name}"

    def to_inner(self, x):
        return np.asarray(x)[self.permutation]

    def from_inner(self, x):
        return np.asarray(x)[self.inverse]

    def evaluate(self, x, rng):
        return self.inner.evaluate(self.to_inner(self._check(x)), rng)

    def noiseless_evaluate(self, x):
        return self.inner.noiseless_evaluate(self.to_inner(self._check(x)))


def binarize_wrap(inner):
    return Binarized(inner)


def shuffle_wrap(inner, seed=None, permutation=None):
    return Shuffled(inner, seed=seed, permutation=permutation)
