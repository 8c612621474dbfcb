"""Bracketed scalar root finding: bisection followed by Newton polish."""

from __future__ import annotations

from typing import Callable

from .errors import InvalidParams, NoConvergence

__all__ = ["bisect", "bisect_newton"]


def bisect(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-8) -> float:
    """Plain bisection on a sign-changing bracket [lo, hi].

    Returns the midpoint of the final bracket once its width is below tol.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise InvalidParams(f"no sign change on [{lo}, {hi}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo < tol:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def bisect_newton(
    f: Callable[[float], float],
    df: Callable[[float], float],
    lo: float,
    hi: float,
    bisect_tol: float = 1e-8,
    tol: float = 1e-12,
    max_newton: int = 60,
) -> float:
    """Bisect a sign-changing bracket down to bisect_tol, then polish the
    midpoint with Newton steps (clamped to the bracket) until the update
    falls below tol (relative to the root's magnitude).
    """
    x = bisect(f, lo, hi, bisect_tol)
    scale = max(1.0, abs(x))
    for _ in range(max_newton):
        fx = f(x)
        dfx = df(x)
        if dfx == 0.0:
            break
        step = fx / dfx
        x_new = x - step
        if x_new < lo or x_new > hi:
            x_new = min(max(x_new, lo), hi)
        if abs(x_new - x) <= tol * scale:
            return x_new
        x = x_new
    if abs(f(x)) > tol * max(1.0, abs(f(lo)), abs(f(hi))):
        raise NoConvergence("Newton polish did not converge")
    return x
