"""Golden-section search, scalar and batched.

All scalar convex/concave searches in the package go through here.
"""

from __future__ import annotations

import math

import numpy as np

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_min(f, lo: float, hi: float, tol: float = 1e-8, expand: bool = True, max_expand: int = 60):
    """Minimise a unimodal ``f`` on ``[lo, hi]``; return ``(x, f(x))``.

    With ``expand=True`` the upper end is doubled (relative to ``lo``)
    until the minimiser is interior.  The lower end is a hard boundary.
    """
    for _ in range(max_expand):
        x, fx = _golden(f, lo, hi, tol)
        if not expand or hi - x > 2 * tol:
            return x, fx
        hi = lo + 2.0 * (hi - lo)
    raise RuntimeError("golden_min: bracket expansion did not terminate")


def golden_max(f, lo: float, hi: float, tol: float = 1e-8, expand: bool = True):
    x, fx = golden_min(lambda z: -f(z), lo, hi, tol, expand)
    return x, -fx


def _golden(f, a: float, b: float, tol: float):
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    candidates = [(f(x), x), (fc, c), (fd, d), (f(a), a), (f(b), b)]
    fx, x = min(candidates)
    return x, fx


def golden_min_batch(f, lo, hi, tol: float = 1e-8):
    """Vectorised golden section over independent brackets.

    ``f`` maps an array of trial points (one per problem) to an array of
    objective values.  Every bracket runs the same number of iterations,
    enough for the widest one to reach ``tol``.
    """
    a = np.array(lo, dtype=float, copy=True)
    b = np.array(hi, dtype=float, copy=True)
    width = float(np.max(b - a)) if a.size else 0.0
    iters = 0 if width <= tol else int(math.ceil(math.log(tol / width) / math.log(INVPHI)))
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc <= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - INVPHI * (b - a)
        new_d = a + INVPHI * (b - a)
        c, d = np.where(left, new_c, d), np.where(left, c, new_d)
        probe = np.where(left, c, d)
        fp = f(probe)
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
    x = 0.5 * (a + b)
    fx = f(x)
    # endpoints can win when the minimiser sits on the boundary
    for cand in (a, b, c, d):
        fcand = f(cand)
        better = fcand < fx
        x = np.where(better, cand, x)
        fx = np.where(better, fcand, fx)
    return x, fx
