"""Compiled inner loops for tree growth and the urn.

All randomness arrives pre-drawn as float64 rows so the compiled path and the
pure-Python step path consume one numpy ``Generator`` stream identically:
each growth step uses ``d`` doubles for candidates followed by one tie-break
double.
"""

import numpy as np
from numba import njit

RULE_MAX = 0
RULE_MIN = 1
RULE_NONE = 2

# layout of the int64 stats vector shared by the kernels
STAT_M_EDGES = 0
STAT_MAX = 1
STAT_COUNT = 2
STAT_LEADER = 3
STAT_LAST_CHANGE = 4
STAT_CHANGES = 5
N_STATS = 6


@njit(cache=True, nogil=True)
def pick_target(cands, tied, degrees, rule, u_tie):
    """Vertex id of the attachment target among ``cands``.

    ``tied`` is scratch space of the same length as ``cands``.
    """
    d = cands.shape[0]
    if rule == RULE_NONE or d == 1:
        return cands[0]
    best = degrees[cands[0]]
    for i in range(1, d):
        k = degrees[cands[i]]
        if (rule == RULE_MAX and k > best) or (rule == RULE_MIN and k < best):
            best = k
    # distinct tied vertices, in order of first appearance
    n_tied = 0
    for i in range(d):
        v = cands[i]
        if degrees[v] != best:
            continue
        seen = False
        for j in range(n_tied):
            if tied[j] == v:
                seen = True
                break
        if not seen:
            tied[n_tied] = v
            n_tied += 1
    if n_tied == 1:
        return tied[0]
    return tied[int(u_tie * n_tied)]


@njit(cache=True, nogil=True)
def advance(endpoints, degrees, hist, stats, draws, rule, uniform):
    """Apply one growth step per row of ``draws``; mutate state in place."""
    d = draws.shape[1] - 1
    cands = np.empty(d, dtype=np.int64)
    tied = np.empty(d, dtype=np.int64)
    m = stats[STAT_M_EDGES]
    big = stats[STAT_MAX]
    count = stats[STAT_COUNT]
    leader = stats[STAT_LEADER]
    last_change = stats[STAT_LAST_CHANGE]
    changes = stats[STAT_CHANGES]
    for r in range(draws.shape[0]):
        if uniform:
            n_vertices = m + 1
            for i in range(d):
                cands[i] = 1 + min(int(draws[r, i] * n_vertices), n_vertices - 1)
        else:
            two_m = 2 * m
            for i in range(d):
                cands[i] = endpoints[min(int(draws[r, i] * two_m), two_m - 1)]
        y = pick_target(cands, tied, degrees, rule, draws[r, d])
        k = degrees[y]
        new = m + 2
        degrees[y] = k + 1
        degrees[new] = 1
        hist[k] -= 1
        hist[k + 1] += 1
        hist[1] += 1
        endpoints[2 * m] = y
        endpoints[2 * m + 1] = new
        m += 1
        if k == big:
            big += 1
            count = 1
            if y != leader:
                leader = y
                changes += 1
                last_change = m
        elif k + 1 == big:
            count += 1
            if y < leader:
                leader = y
                changes += 1
                last_change = m
    stats[STAT_M_EDGES] = m
    stats[STAT_MAX] = big
    stats[STAT_COUNT] = count
    stats[STAT_LEADER] = leader
    stats[STAT_LAST_CHANGE] = last_change
    stats[STAT_CHANGES] = changes


@njit(cache=True, nogil=True)
def final_max_batch(draws, rule, uniform):
    """Final max degree of many independent short runs.

    ``draws`` has shape (runs, steps - 1, d + 1); every run starts at the
    one-edge tree.
    """
    runs, n_grow, width = draws.shape
    n_edges = n_grow + 1
    out = np.empty(runs, dtype=np.int64)
    endpoints = np.empty(2 * n_edges, dtype=np.uint32)
    degrees = np.zeros(n_edges + 2, dtype=np.int64)
    hist = np.zeros(n_edges + 2, dtype=np.int64)
    stats = np.empty(N_STATS, dtype=np.int64)
    for r in range(runs):
        degrees[:] = 0
        hist[:] = 0
        degrees[1] = 1
        degrees[2] = 1
        hist[1] = 2
        endpoints[0] = 1
        endpoints[1] = 2
        stats[STAT_M_EDGES] = 1
        stats[STAT_MAX] = 1
        stats[STAT_COUNT] = 2
        stats[STAT_LEADER] = 1
        stats[STAT_LAST_CHANGE] = 0
        stats[STAT_CHANGES] = 0
        advance(endpoints, degrees, hist, stats, draws[r], rule, uniform)
        out[r] = stats[STAT_MAX]
    return out


@njit(cache=True, nogil=True)
def urn_advance(counts, draws):
    """Multi-draw urn: ``counts`` is [black, white, steps]; one row per step."""
    black = counts[0]
    white = counts[1]
    steps = counts[2]
    d = draws.shape[1]
    for r in range(draws.shape[0]):
        total = black + white
        hit = False
        for i in range(d):
            if draws[r, i] * total < black:
                hit = True
        if hit:
            black += 1
            white += 1
        else:
            white += 2
        steps += 1
    counts[0] = black
    counts[1] = white
    counts[2] = steps
