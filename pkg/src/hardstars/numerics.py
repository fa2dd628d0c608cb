"""Small numerical helpers used across the package.

Only utilities with package-specific conventions live here (cumulative
Simpson rule on uniform grids, finite differences with one-sided closures,
sign-change scanning).  Anything generic beyond that is taken straight from
numpy/scipy.
"""

from __future__ import annotations

from typing import Callable

import numpy as np


def cumulative_simpson_uniform(y: np.ndarray, dx: float) -> np.ndarray:
    """Cumulative integral of samples ``y`` on a uniform grid.

    Each sub-interval is integrated with the quadratic through the three
    nearest samples; the per-interval defect is O(dx^4) with a fixed sign,
    so the cumulative error is O(dx^3) and varies smoothly from node to
    node (no parity wobble to pollute later differencing).  The first
    entry is 0.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if n < 2:
        return np.zeros_like(y)
    out = np.empty_like(y)
    out[0] = 0.0
    if n == 2:
        out[1] = 0.5 * dx * (y[0] + y[1])
        return out
    # Parabola through (j-1, j, j+1): left half-panel and right half-panel.
    left = dx * (5.0 * y[:-2] + 8.0 * y[1:-1] - y[2:]) / 12.0
    right = dx * (-y[:-2] + 8.0 * y[1:-1] + 5.0 * y[2:]) / 12.0
    inc = np.empty(n - 1)
    inc[0] = left[0]
    inc[1:] = right
    np.cumsum(inc, out=out[1:])
    return out


def simpson_uniform(y: np.ndarray, dx: float) -> float:
    """Definite integral over the whole uniform grid (Simpson accuracy)."""
    return float(cumulative_simpson_uniform(y, dx)[-1])


def derivative_uniform(y: np.ndarray, dx: float, order: int = 2) -> np.ndarray:
    """First derivative on a uniform grid.

    order=2: centred stencil with second-order one-sided closures.
    order=4: five-point centred stencil, fourth-order one-sided closures.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if order == 2:
        return np.gradient(y, dx, edge_order=2)
    if order != 4:
        raise ValueError("order must be 2 or 4")
    if n < 6:
        raise ValueError("need at least 6 samples for the fourth-order stencil")
    d = np.empty_like(y)
    d[2:-2] = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * dx)
    edge = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12.0 * dx)
    near = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / (12.0 * dx)
    d[0] = np.dot(edge, y[:5])
    d[1] = np.dot(near, y[:5])
    d[-1] = -np.dot(edge, y[-1:-6:-1])
    d[-2] = -np.dot(near, y[-1:-6:-1])
    return d


def second_derivative_uniform(y: np.ndarray, dx: float) -> np.ndarray:
    """Second derivative, centred second order with one-sided ends."""
    y = np.asarray(y, dtype=float)
    d = np.empty_like(y)
    d[1:-1] = (y[:-2] - 2.0 * y[1:-1] + y[2:]) / (dx * dx)
    d[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / (dx * dx)
    d[-1] = (2.0 * y[-1] - 5.0 * y[-2] + 4.0 * y[-3] - y[-4]) / (dx * dx)
    return d


def scan_sign_changes(f: Callable[[float], float], grid: np.ndarray) -> list[tuple[float, float]]:
    """Evaluate ``f`` on ``grid`` and return the bracketing pairs where it changes sign."""
    vals = np.array([f(float(x)) for x in grid])
    brackets = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if np.isfinite(a) and np.isfinite(b) and a * b < 0.0:
            brackets.append((float(grid[i]), float(grid[i + 1])))
    return brackets
