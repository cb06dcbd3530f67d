"""Shared scalar numerics: monotone root finding and adaptive quadrature."""

from __future__ import annotations

from typing import Callable


def bisect_increasing(
    fn: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    *,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Solve fn(x) = target for a nondecreasing fn on [lo, hi] by bisection.

    When the target lies outside [fn(lo), fn(hi)] the nearer endpoint is
    returned, which is the right convention for quantiles of distributions
    whose tails were cut at negligible mass.
    """
    if not lo <= hi:
        raise ValueError(f"empty bracket [{lo}, {hi}]")
    if target <= fn(lo):
        return lo
    if target >= fn(hi):
        return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _simpson_rec(fn, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = fn(lm)
    frm = fn(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        # Richardson correction: the pair of half-width rules gains a factor 16
        return left + right + delta / 15.0
    return _simpson_rec(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + _simpson_rec(
        fn, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1
    )


def adaptive_simpson(
    fn: Callable[[float], float],
    a: float,
    b: float,
    *,
    tol: float = 1e-10,
    max_depth: int = 48,
) -> float:
    """Adaptive Simpson quadrature of fn over [a, b] to absolute tolerance tol."""
    if a == b:
        return 0.0
    fa = fn(a)
    fb = fn(b)
    m = 0.5 * (a + b)
    fm = fn(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_rec(fn, a, b, fa, fm, fb, whole, tol, max_depth)


def composite_simpson(fn: Callable[[float], float], a: float, b: float, n: int) -> float:
    """Composite Simpson rule with n (even) subintervals, no adaptivity."""
    if n % 2:
        n += 1
    h = (b - a) / n
    total = fn(a) + fn(b)
    for k in range(1, n):
        total += fn(a + k * h) * (4.0 if k % 2 else 2.0)
    return total * h / 3.0
