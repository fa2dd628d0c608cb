"""Quadrature, difference stencils, and root bracketing."""

from __future__ import annotations

import math

import numpy as np

from hardstars.numerics import (
    cumulative_simpson_uniform,
    derivative_uniform,
    scan_sign_changes,
    second_derivative_uniform,
    simpson_uniform,
)


def test_cumulative_simpson_exact_on_quadratics():
    x = np.linspace(0.0, 2.0, 41)
    dx = x[1] - x[0]
    y = 3.0 * x**2 - 2.0 * x + 0.5
    exact = x**3 - x**2 + 0.5 * x
    got = cumulative_simpson_uniform(y, dx)
    assert np.max(np.abs(got - exact)) <= 1e-13


def test_cumulative_simpson_smooth_defect():
    # the cubic defect drifts with one sign instead of oscillating, so
    # second differences of the output stay at the much smaller h^4 scale
    x = np.linspace(0.0, 2.0, 41)
    dx = x[1] - x[0]
    y = 3.0 * x**3 - 2.0 * x**2 + x - 0.5
    exact = 0.75 * x**4 - (2.0 / 3.0) * x**3 + 0.5 * x**2 - 0.5 * x
    err = cumulative_simpson_uniform(y, dx) - exact
    wobble = np.abs(np.diff(err[2:], n=2)).max()
    assert wobble <= 1e-3 * np.abs(err).max()


def test_cumulative_simpson_third_order():
    sup_errs = []
    for n in (33, 65):
        x = np.linspace(0.0, 1.0, n)
        got = cumulative_simpson_uniform(np.sin(x), x[1] - x[0])
        sup_errs.append(np.max(np.abs(got - (1.0 - np.cos(x)))))
    assert 6.0 <= sup_errs[0] / sup_errs[1] <= 10.0


def test_simpson_matches_cumulative_endpoint():
    x = np.linspace(0.0, 3.0, 61)
    y = np.exp(-x) * np.cos(2.0 * x)
    dx = x[1] - x[0]
    assert simpson_uniform(y, dx) == cumulative_simpson_uniform(y, dx)[-1]


def test_derivative_stencil_orders():
    for order, poly_deg in ((2, 2), (4, 4)):
        x = np.linspace(-1.0, 1.0, 31)
        y = x**poly_deg
        got = derivative_uniform(y, x[1] - x[0], order=order)
        exact = poly_deg * x ** (poly_deg - 1)
        assert np.max(np.abs(got - exact)) <= 1e-12


def test_derivative_convergence_rates():
    for order, lo, hi in ((2, 3.5, 4.5), (4, 13.0, 20.0)):
        errs = []
        for n in (41, 81):
            x = np.linspace(0.0, 1.0, n)
            got = derivative_uniform(np.sin(3.0 * x), x[1] - x[0], order=order)
            errs.append(np.max(np.abs(got - 3.0 * np.cos(3.0 * x))))
        assert lo <= errs[0] / errs[1] <= hi


def test_second_derivative_convergence():
    errs = []
    for n in (41, 81):
        x = np.linspace(0.0, 1.0, n)
        got = second_derivative_uniform(np.sin(3.0 * x), x[1] - x[0])
        errs.append(np.max(np.abs(got + 9.0 * np.sin(3.0 * x))))
    assert 3.0 <= errs[0] / errs[1] <= 5.5


def test_scan_sign_changes_finds_cosine_zeros():
    grid = np.linspace(0.0, 10.0, 200)
    brackets = scan_sign_changes(math.cos, grid)
    assert len(brackets) == 3
    for (lo, hi), zero in zip(brackets, (0.5 * math.pi, 1.5 * math.pi, 2.5 * math.pi)):
        assert lo < zero < hi
