"""Running maximum-degree statistics, scaled metrics and scale-function diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Mapping

if TYPE_CHECKING:
    from .tree_model import ModelConfig, StepOutcome, TreeState


@dataclass(frozen=True)
class MaxStats:
    """Maximum degree bookkeeping for a tree with ``n`` edges.

    ``leader`` is the smallest vertex id among the vertices of maximal degree.
    ``last_change_step`` and ``change_count`` track changes of that identity.
    """

    n: int
    max_degree: int
    max_count: int
    leader: int
    last_change_step: int = 0
    change_count: int = 0


def initial_max_stats() -> MaxStats:
    """Stats of the one-edge tree: both endpoints have degree 1."""
    return MaxStats(n=1, max_degree=1, max_count=2, leader=1)


def update_max_stats(
    stats: MaxStats,
    outcome: StepOutcome,
    histogram: Mapping[int, int] | None = None,
) -> MaxStats:
    """Advance ``stats`` over one growth step in O(1).

    If ``histogram`` (the post-step degree histogram) is given, the result is
    cross-checked against it.
    """
    k = outcome.chosen_degree
    n = stats.n + 1
    leader = stats.leader
    if k == stats.max_degree:
        new = replace(stats, n=n, max_degree=k + 1, max_count=1, leader=outcome.chosen)
    elif k + 1 == stats.max_degree:
        new = replace(
            stats,
            n=n,
            max_count=stats.max_count + 1,
            leader=min(leader, outcome.chosen),
        )
    else:
        new = replace(stats, n=n)
    if new.leader != leader:
        new = replace(new, last_change_step=n, change_count=stats.change_count + 1)
    if histogram is not None:
        if histogram.get(new.max_degree, 0) != new.max_count:
            raise AssertionError(
                f"max count {new.max_count} disagrees with histogram "
                f"entry {histogram.get(new.max_degree, 0)} at degree {new.max_degree}"
            )
        if any(deg > new.max_degree for deg, cnt in histogram.items() if cnt):
            raise AssertionError("histogram holds a degree above the tracked maximum")
    return new


def recount_max_stats(state: TreeState) -> tuple[int, int, int]:
    """(max degree, count at max, smallest id at max) computed from scratch."""
    degrees = state.degrees
    big = int(degrees.max())
    at_max = degrees == big
    return big, int(at_max.sum()), int(at_max.argmax()) + 1


def scaled_metric(n: int, max_degree: int, d: int) -> float:
    """Max degree divided by its growth order for ``d`` draws.

    d = 1: M/sqrt(n); d = 2: M log(n)/n; d >= 3: M/n.
    """
    if d <= 0:
        raise ValueError(f"d must be positive, got {d}")
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if d == 1:
        return max_degree / math.sqrt(n)
    if d == 2:
        return max_degree * math.log(n) / n
    return max_degree / n


@dataclass(frozen=True)
class DiagnosticScales:
    c: float
    q: float
    u: float


def scale_functions(n: int, max_degree: int, c: float) -> DiagnosticScales:
    """Q = exp(c n / M) / n and its reciprocal U = n exp(-c n / M)."""
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    e = c * n / max_degree
    return DiagnosticScales(c=c, q=math.exp(e) / n, u=n * math.exp(-e))


def hub_increment_probability_d2(n: int, max_degree: int) -> float:
    """Probability that a unique maximum grows for d = 2: (M/n)(1 - M/4n)."""
    if max_degree > 2 * n:
        raise ValueError(f"max degree {max_degree} exceeds 2n = {2 * n}")
    return (max_degree / n) * (1.0 - max_degree / (4.0 * n))


def drift_check_d2(n: int, max_degree: int, c: float) -> tuple[float, float]:
    """Exact one-step drifts E[Q_{n+1}/Q_n] - 1 and E[U_{n+1}/U_n] - 1.

    Assumes a unique vertex of maximal degree and two draws. Both values must
    be non-positive wherever the corresponding scale function is a
    supermartingale. Evaluated with expm1 so that drifts of order 1/n survive
    cancellation.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if not 1 <= max_degree <= 2 * n:
        raise ValueError(f"max degree must lie in [1, 2n], got {max_degree}")
    p = hub_increment_probability_d2(n, max_degree)
    # exponent shifts of c n / M when M stays and when M grows by one
    stay = c / max_degree
    grow = c * (max_degree - n) / (max_degree * (max_degree + 1.0))
    q_drift = (n * ((1 - p) * math.expm1(stay) + p * math.expm1(grow)) - 1) / (n + 1)
    u_drift = ((n + 1) * ((1 - p) * math.expm1(-stay) + p * math.expm1(-grow)) + 1) / n
    return q_drift, u_drift


@dataclass(frozen=True)
class Snapshot:
    n: int
    max_degree: int
    max_count: int
    leader: int
    change_count: int
    scaled_metric: float
    last_change_step: int = 0


def snapshot(stats: MaxStats, d: int) -> Snapshot:
    metric = scaled_metric(stats.n, stats.max_degree, d) if stats.n >= 2 else math.nan
    return Snapshot(
        n=stats.n,
        max_degree=stats.max_degree,
        max_count=stats.max_count,
        leader=stats.leader,
        change_count=stats.change_count,
        scaled_metric=metric,
        last_change_step=stats.last_change_step,
    )


@dataclass
class TrajectoryRecord:
    """Checkpoint snapshots of one run, in increasing ``n``."""

    config: ModelConfig
    snapshots: list[Snapshot] = field(default_factory=list)
    final: MaxStats | None = None
    state: TreeState | None = field(default=None, repr=False, compare=False)

    def at(self, n: int) -> Snapshot:
        for snap in self.snapshots:
            if snap.n == n:
                return snap
        raise KeyError(n)
