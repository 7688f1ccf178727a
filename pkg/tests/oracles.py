"""Independent reference computations used by the tests.

Nothing here imports the package's implementation of the quantity it checks.
"""

from collections import defaultdict
from fractions import Fraction
from itertools import product
import math

import numpy as np


def labelled_law(n_target, d, rule, attachment):
    """Law of the sorted degree multiset by enumerating labelled draws.

    Walks every ordered d-tuple of vertices with its exact probability and
    resolves ties over distinct tied vertices, one vertex at a time.
    """
    states = {(1, 1): Fraction(1)}
    for m in range(1, n_target):
        nxt = defaultdict(Fraction)
        for degs, p in states.items():
            nv = len(degs)
            if attachment == "preferential":
                w = [Fraction(k, 2 * m) for k in degs]
            else:
                w = [Fraction(1, nv)] * nv
            draws = 1 if rule == "none" else d
            for tup in product(range(nv), repeat=draws):
                pt = p
                for v in tup:
                    pt *= w[v]
                if not pt:
                    continue
                vals = [degs[v] for v in tup]
                best = min(vals) if rule == "min" else max(vals)
                tied = sorted({v for v in tup if degs[v] == best})
                for v in tied:
                    grown = list(degs)
                    grown[v] += 1
                    grown.append(1)
                    nxt[tuple(grown)] += pt / len(tied)
        states = nxt
    law = defaultdict(Fraction)
    for degs, p in states.items():
        law[tuple(sorted(degs, reverse=True))] += p
    return dict(law)


def quadratic_x_star_d3():
    # 1 - (1 - x/2)^3 = x  <=>  x (x^2 - 6x + 4) = 0 after clearing x/8
    a, b, c = 1.0, -6.0, 4.0
    return (-b - math.sqrt(b * b - 4 * a * c)) / (2 * a)


def cubic_x_star_d4():
    # y = 1 - x/2 solves (y - 1)(y^3 + y^2 + y - 1) = 0
    roots = np.roots([1.0, 1.0, 1.0, -1.0])
    y = min(roots, key=lambda r: abs(r.imag)).real
    return 2.0 * (1.0 - y)


def drift_mp(n, M, c, dps=60):
    """E[Q_{n+1}/Q_n] - 1 and E[U_{n+1}/U_n] - 1 in high precision, from the raw ratios."""
    from mpmath import exp, mp, mpf

    with mp.workdps(dps):
        n, M, c = mpf(n), mpf(M), mpf(c)
        p = M / n * (1 - M / (4 * n))
        q_same = exp(c * (n + 1) / M) / (n + 1) / (exp(c * n / M) / n)
        q_grow = exp(c * (n + 1) / (M + 1)) / (n + 1) / (exp(c * n / M) / n)
        u_same = (n + 1) * exp(-c * (n + 1) / M) / (n * exp(-c * n / M))
        u_grow = (n + 1) * exp(-c * (n + 1) / (M + 1)) / (n * exp(-c * n / M))
        return float((1 - p) * q_same + p * q_grow - 1), float((1 - p) * u_same + p * u_grow - 1)


def total_variation(p, q):
    keys = set(p) | set(q)
    return 0.5 * sum(abs(float(p.get(k, 0)) - float(q.get(k, 0))) for k in keys)
