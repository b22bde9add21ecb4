"""One-dimensional maximization helpers."""

import math

import numpy as np

INV_PHI = (math.sqrt(5) - 1) / 2


def golden_section_max(f, a, b, tol=1e-6):
    """Maximize a unimodal ``f`` on ``[a, b]`` by golden-section search.

    Stops once the bracket is shorter than ``tol``. Returns ``(x, f(x))`` for
    the best point evaluated, endpoints excluded.
    """
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = f(c)
    fd = f(d)
    best = (c, fc) if fc >= fd else (d, fd)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            if fc > best[1]:
                best = (c, fc)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            if fd > best[1]:
                best = (d, fd)
    return best


def grid_then_golden(f, lo, hi, n_grid, tol, log=True, mapper=map):
    """Coarse grid search on ``[lo, hi]`` followed by golden-section refinement.

    The grid is log-spaced when ``log`` is true and the refinement then works
    in ``log10`` coordinates with tolerance ``tol`` there. Returns
    ``(x_best, f_best, index)`` where ``index`` is the position of the best
    grid point, so callers can detect maxima at the edges. ``mapper`` runs
    the grid evaluations (e.g. an executor's ``map``).
    """
    if log:
        xs = np.logspace(math.log10(lo), math.log10(hi), n_grid)
    else:
        xs = np.linspace(lo, hi, n_grid)
    values = np.array(list(mapper(f, xs)), dtype=float)
    if np.all(np.isnan(values)):
        raise FloatingPointError("objective is NaN on the whole grid")
    i = int(np.nanargmax(values))
    best = (float(xs[i]), float(values[i]))
    left, right = xs[max(i - 1, 0)], xs[min(i + 1, n_grid - 1)]
    if right > left:
        if log:
            x, fx = golden_section_max(lambda u: f(10.0**u), math.log10(left), math.log10(right), tol)
            x = 10.0**x
        else:
            x, fx = golden_section_max(f, left, right, tol)
        if fx > best[1]:
            best = (float(x), float(fx))
    return best[0], best[1], i
