"""Scalar minimization by coarse scan plus golden-section refinement."""

import numpy as np

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section(fn, lo, hi, tol):
    """Golden-section search for a minimum of ``fn`` on [lo, hi].

    Assumes the bracket contains a single local minimum. Returns (x, fn(x))
    with the bracket narrowed below ``tol``.
    """
    a, b = float(lo), float(hi)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


def refine_minimum(fn, lo, hi, n_coarse=201, tol=1e-6):
    """Locate the global minimum of ``fn`` on [lo, hi].

    A coarse grid scan brackets the smallest value, then golden-section search
    refines within the bracketing neighbors. Returns (x, fn(x), at_boundary)
    where ``at_boundary`` is True when the minimum sits within ``tol`` of an
    endpoint of the range (a monotone objective, not an interior minimum).
    """
    grid = np.linspace(lo, hi, int(n_coarse))
    values = np.array([fn(x) for x in grid])
    i = int(np.argmin(values))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]
    if a == b:  # degenerate single-point grid
        return float(a), float(values[i]), True
    x, fx = golden_section(fn, a, b, tol)
    at_boundary = (x - lo) <= tol or (hi - x) <= tol
    return float(x), float(fx), bool(at_boundary)
