import numpy as np

from ..exceptions import ConfigError


def surface_grid(bounds, resolution):
    if bounds.dim != 2:
        raise ConfigError("surface export needs a two-dimensional problem")
    if int(resolution) != resolution or resolution < 1:
        raise ConfigError("resolution must be a positive integer")
    g1 = np.linspace(bounds.lower[0], bounds.upper[0], resolution + 1)
    g2 = np.linspace(bounds.lower[1], bounds.upper[1], resolution + 1)
    X1, X2 = np.meshgrid(g1, g2, indexing="ij")
    return np.column_stack([X1.ravel(), X2.ravel()])


def surface_export(model, bounds, resolution):
    """Model values on a ``(resolution + 1)^2`` grid, rows ``(x1, x2, value)``
    with ``x1`` varying slowest."""
    grid = surface_grid(bounds, resolution)
    values = np.asarray(model.predict(grid), dtype=float)
    return np.column_stack([grid, values])
