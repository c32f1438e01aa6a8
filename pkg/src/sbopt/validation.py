"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

import numbers

import numpy as np

from .exceptions import ConfigError


def check_int_array(x, name="x", ndim=1):
    """Return ``x`` as an int64 array, refusing non-integral values."""
    arr = np.asarray(x)
    if arr.ndim != ndim:
        raise ConfigError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if arr.dtype == bool:
            return arr.astype(np.int64)
        farr = arr.astype(float)
        if not np.all(np.isfinite(farr)) or np.any(farr != np.round(farr)):
            raise ConfigError(f"{name} must contain integers")
        return farr.astype(np.int64)
    return arr.astype(np.int64)


def check_point(bounds, x, name="x"):
    """Validate an integer point against ``bounds`` and return it as int64."""
    arr = check_int_array(x, name=name)
    if arr.shape[0] != bounds.dim:
        raise ConfigError(f"{name} has dimension {arr.shape[0]}, expected {bounds.dim}")
    if np.any(arr < bounds.lower) or np.any(arr > bounds.upper):
        raise ConfigError(f"{name} violates bounds")
    return arr


def check_real_point(x, dim, name="x"):
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != dim:
        raise ConfigError(f"{name} must have shape ({dim},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} must be finite")
    return arr


def check_positive(value, name, strict=True, integer=False):
    kind = numbers.Integral if integer else numbers.Real
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ConfigError(f"{name} must be {'an integer' if integer else 'a number'}")
    if not np.isfinite(value) or (value <= 0 if strict else value < 0):
        raise ConfigError(f"{name} must be {'positive' if strict else 'non-negative'}, got {value}")
    return value


def as_generator(random_state):
    """Turn a seed, ``SeedSequence`` or ``Generator`` into a ``Generator``."""
    if isinstance(random_state, np.random.Generator):
        return random_state
    return np.random.default_rng(random_state)
