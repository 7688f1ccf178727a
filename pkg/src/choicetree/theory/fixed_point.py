"""Step probability, choice intensity, the limit constant and predicted maxima."""

from __future__ import annotations

import math
from dataclasses import dataclass


class NoInteriorRoot(ValueError):
    """The fixed-point equation has no root strictly inside (0, 2)."""


class UnsupportedRegime(ValueError):
    """No closed-form prediction exists for the requested number of draws."""


def attachment_probability(max_degree: int, max_count: int, n: int, d: int) -> float:
    """Probability that the maximum degree grows on the next step: 1 - (1 - ML/2n)^d."""
    if d < 1:
        raise ValueError(f"d must be at least 1, got {d}")
    weight = max_degree * max_count
    if not 1 <= weight <= 2 * n:
        raise ValueError(f"need 1 <= M*L <= 2n, got M*L={weight}, n={n}")
    # the non-maximal share is formed as an integer ratio; the urn does the same
    return 1.0 - ((2 * n - weight) / (2 * n)) ** d


def choice_intensity(x: float, d: int) -> float:
    """Half the geometric sum of (1 - x/2)^i for i < d.

    Equals fixed_point_map(x, d) / x away from zero.
    """
    if not 0 <= x <= 2:
        raise ValueError(f"x must lie in [0, 2], got {x}")
    r = 1.0 - x / 2.0
    return 0.5 * sum(r**i for i in range(d))


def fixed_point_map(x: float, d: int) -> float:
    """1 - (1 - x/2)^d: growth probability of a hub holding fraction x of n."""
    if not 0 <= x <= 2:
        raise ValueError(f"x must lie in [0, 2], got {x}")
    return 1.0 - (1.0 - x / 2.0) ** d


def fixed_point_derivative(x: float, d: int) -> float:
    return 0.5 * d * (1.0 - x / 2.0) ** (d - 1)


@dataclass(frozen=True)
class FixedPointResult:
    d: int
    x_star: float
    residual: float
    derivative: float
    iterations: int


def solve_x_star(d: int, tol: float = 1e-12, max_iter: int = 400) -> FixedPointResult:
    """Positive root of 1 - (1 - x/2)^d = x by bisection on [tol, 2].

    For d >= 3 the map crosses the diagonal exactly once inside (0, 2), from
    above, and the crossing is stable.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if d <= 2:
        # d = 2: q(x) - x = -x^2/4, d = 1: -x/2
        raise NoInteriorRoot(f"no root of q(x) = x in (0, 2) for d = {d}")

    def g(x):
        return fixed_point_map(x, d) - x

    lo, hi = tol, 2.0
    g_lo = g(lo)
    if not (g_lo > 0 and g(hi) < 0):
        raise NoInteriorRoot(f"root not bracketed on [{lo}, {hi}] for d = {d}")
    mid = 0.5 * (lo + hi)
    g_mid = g(mid)
    it = 1
    while it < max_iter and (abs(g_mid) > tol or hi - lo > tol):
        if g_mid > 0:
            lo = mid
        else:
            hi = mid
        new_mid = 0.5 * (lo + hi)
        if new_mid in (lo, hi):
            break
        mid = new_mid
        g_mid = g(mid)
        it += 1
    if abs(g_mid) > tol:
        raise ArithmeticError(f"bisection stalled at residual {abs(g_mid):.3g} for d = {d}")
    derivative = fixed_point_derivative(mid, d)
    if not derivative < 1:
        raise ArithmeticError(f"fixed point {mid} for d = {d} is not stable")
    return FixedPointResult(d=d, x_star=mid, residual=abs(g_mid), derivative=derivative, iterations=it)


def predicted_max(n: float, d: int) -> float:
    """Leading-order maximum degree: 4n/ln n for d = 2, x*(d) n for d >= 3."""
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    if d <= 1:
        raise UnsupportedRegime("the no-choice maximum has a random sqrt(n) prefactor")
    if d == 2:
        return 4.0 * n / math.log(n)
    return solve_x_star(d).x_star * n
