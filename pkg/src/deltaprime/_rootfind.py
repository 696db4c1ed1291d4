"""Safeguarded bracketing root refinement: bisection with secant acceleration.

The iterate never leaves the current bracket.  A secant step through the
bracket endpoints is used when it lands well inside; every third step is a
plain bisection so the bracket width is guaranteed to shrink geometrically
even when the secant stagnates near one endpoint.
"""

from __future__ import annotations

import math


def refine_bracket(f, a, b, fa=None, fb=None, xtol=1e-10, max_iter=200):
    """Refine a sign-change bracket [a, b] of f.

    Returns (root, f(root), (a, b), n_evals) with the final bracket width
    at most xtol (or max_iter exhausted, whichever comes first).
    f(a) and f(b) must have opposite signs; exact zeros are returned
    immediately with a collapsed bracket.
    """
    if not a < b:
        raise ValueError(f"bracket requires a < b, got [{a}, {b}]")
    n_evals = 0
    if fa is None:
        fa = f(a)
        n_evals += 1
    if fb is None:
        fb = f(b)
        n_evals += 1
    if fa == 0.0:
        return a, fa, (a, a), n_evals
    if fb == 0.0:
        return b, fb, (b, b), n_evals
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise ValueError(f"f({a})={fa} and f({b})={fb} do not bracket a root")

    for it in range(max_iter):
        width = b - a
        if width <= xtol:
            break
        x = a + 0.5 * width
        if it % 3 != 2:  # two secant attempts, then one forced bisection
            s = a - fa * width / (fb - fa)
            margin = 0.1 * width
            if a + margin < s < b - margin:
                x = s
        fx = f(x)
        n_evals += 1
        if fx == 0.0:
            return x, fx, (x, x), n_evals
        if math.copysign(1.0, fx) == math.copysign(1.0, fa):
            a, fa = x, fx
        else:
            b, fb = x, fx

    root, froot = (a, fa) if abs(fa) <= abs(fb) else (b, fb)
    return root, froot, (a, b), n_evals
