"""Growing preferential-attachment trees with max/min/no choice among d draws.

Vertex ids are 1-based. The tree with ``m`` edges has vertices ``1..m+1``;
the step that creates edge ``m`` adds vertex ``m+1``.

Degree-proportional sampling uses the endpoint list: edge ``j`` (1-based)
occupies slots ``2j-2`` (the old endpoint) and ``2j-1`` (the new vertex), so a
uniform slot is a vertex drawn with probability ``deg / 2m``.

Every growth step consumes exactly ``d + 1`` doubles from the run's
``numpy.random.Generator``: ``d`` for the candidates, then one for the
tie-break (drawn even when no tie occurs). The compiled runner and the
per-step Python path therefore produce identical trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels
from .observables import (
    MaxStats,
    TrajectoryRecord,
    initial_max_stats,
    snapshot,
    update_max_stats,
)

CHOICE_RULES = ("max", "min", "none")
ATTACHMENTS = ("preferential", "uniform")
TIE_BREAKS = ("uniform_among_tied",)

MAX_STEPS = 2**31
_CHUNK = 1 << 16
_RULE_CODES = {"max": _kernels.RULE_MAX, "min": _kernels.RULE_MIN, "none": _kernels.RULE_NONE}


@dataclass(frozen=True)
class ModelConfig:
    """Model variant: number of draws, choice rule, attachment law and seed."""

    d: int = 2
    choice_rule: str = "max"
    attachment: str = "preferential"
    tie_break: str = "uniform_among_tied"
    seed: int = 0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d!r}")
        if self.choice_rule not in CHOICE_RULES:
            raise ValueError(f"choice_rule must be one of {CHOICE_RULES}, got {self.choice_rule!r}")
        if self.attachment not in ATTACHMENTS:
            raise ValueError(f"attachment must be one of {ATTACHMENTS}, got {self.attachment!r}")
        if self.tie_break not in TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {TIE_BREAKS}, got {self.tie_break!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")

    @property
    def effective_d(self) -> int:
        """Draws that influence the choice (1 for the no-choice rule)."""
        return 1 if self.choice_rule == "none" else self.d

    def with_seed(self, seed: int) -> ModelConfig:
        return ModelConfig(self.d, self.choice_rule, self.attachment, self.tie_break, seed)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


class TreeState:
    """Degree sequence, endpoint list and degree histogram of a growing tree.

    Storage is preallocated for ``capacity`` edges and grows on demand.
    """

    def __init__(self, capacity: int = 1):
        capacity = max(int(capacity), 1)
        self.m = 0
        self.max_degree = 0
        self._endpoints = np.zeros(2 * capacity, dtype=np.uint32)
        self._degrees = np.zeros(capacity + 2, dtype=np.int64)
        self._hist = np.zeros(capacity + 2, dtype=np.int64)

    @property
    def capacity(self) -> int:
        return self._endpoints.shape[0] // 2

    @property
    def n_vertices(self) -> int:
        return self.m + 1

    @property
    def degrees(self) -> np.ndarray:
        """Degrees of vertices ``1..m+1`` (vertex ``v`` at position ``v-1``)."""
        return self._degrees[1 : self.m + 2]

    def degree(self, v: int) -> int:
        return int(self._degrees[v])

    @property
    def endpoint_list(self) -> np.ndarray:
        return self._endpoints[: 2 * self.m]

    @property
    def degree_histogram(self) -> dict[int, int]:
        (ks,) = np.nonzero(self._hist)
        return {int(k): int(self._hist[k]) for k in ks}

    def reserve(self, n_edges: int) -> None:
        if n_edges <= self.capacity:
            return
        if n_edges > MAX_STEPS:
            raise ValueError(f"at most {MAX_STEPS} edges are supported")
        new_cap = min(max(n_edges, 2 * self.capacity), MAX_STEPS)
        for name, size in (("_endpoints", 2 * new_cap), ("_degrees", new_cap + 2), ("_hist", new_cap + 2)):
            old = getattr(self, name)
            grown = np.zeros(size, dtype=old.dtype)
            grown[: old.shape[0]] = old
            setattr(self, name, grown)

    def edges(self) -> np.ndarray:
        """(m, 2) array of edges in creation order."""
        return self.endpoint_list.reshape(-1, 2)

    def check_invariants(self) -> None:
        """Raise AssertionError if any structural invariant is broken."""
        m = self.m
        degrees = self.degrees
        assert degrees.shape[0] == m + 1
        assert int(degrees.sum()) == 2 * m, "handshake"
        assert self.endpoint_list.shape[0] == 2 * m
        counts = np.bincount(self.endpoint_list, minlength=m + 2)[1 : m + 2]
        assert np.array_equal(counts, degrees), "endpoint multiplicities"
        assert (degrees >= 1).all()
        recount = np.bincount(degrees, minlength=self._hist.shape[0])
        assert np.array_equal(recount, self._hist[: recount.shape[0]]), "histogram"
        assert not self._hist[recount.shape[0] :].any(), "histogram"
        assert self.max_degree == int(degrees.max())


@dataclass(frozen=True)
class StepOutcome:
    """One growth step: the draws, the chosen vertex and its degree before attaching."""

    step: int
    candidates: tuple[int, ...]
    chosen: int
    chosen_degree: int
    new_vertex: int
    max_before: int
    max_after: int


def init_tree(capacity: int = 1) -> TreeState:
    """The one-edge tree: vertices 1 and 2 joined by a single edge."""
    state = TreeState(capacity)
    state.m = 1
    state.max_degree = 1
    state._endpoints[:2] = (1, 2)
    state._degrees[1:3] = 1
    state._hist[1] = 2
    return state


def sample_candidate(state: TreeState, config: ModelConfig, rng: np.random.Generator) -> int:
    """One candidate vertex, drawn with probability deg/2m (or 1/(m+1) if uniform)."""
    if state.m < 1:
        raise RuntimeError("cannot sample from an empty tree")
    u = rng.random()
    if config.attachment == "uniform":
        n_vertices = state.m + 1
        return 1 + min(int(u * n_vertices), n_vertices - 1)
    two_m = 2 * state.m
    return int(state._endpoints[min(int(u * two_m), two_m - 1)])


def select_attachment(
    candidates: Sequence[int],
    state: TreeState,
    config: ModelConfig,
    rng: np.random.Generator,
) -> int:
    """Pick the attachment target among ``candidates``.

    Ties at the extreme degree are broken uniformly over the distinct tied
    vertices; repeated draws of one vertex count once. Always consumes one
    double from ``rng``.
    """
    u = rng.random()
    if config.choice_rule == "none" or len(candidates) == 1:
        return candidates[0]
    degs = [state.degree(v) for v in candidates]
    best = max(degs) if config.choice_rule == "max" else min(degs)
    tied = list(dict.fromkeys(v for v, k in zip(candidates, degs) if k == best))
    if len(tied) == 1:
        return tied[0]
    return tied[int(u * len(tied))]


def _attach(state: TreeState, target: int) -> int:
    m = state.m
    state.reserve(m + 1)
    k = int(state._degrees[target])
    new = m + 2
    state._degrees[target] = k + 1
    state._degrees[new] = 1
    state._hist[k] -= 1
    state._hist[k + 1] += 1
    state._hist[1] += 1
    state._endpoints[2 * m] = target
    state._endpoints[2 * m + 1] = new
    state.m = m + 1
    if k + 1 > state.max_degree:
        state.max_degree = k + 1
    return new


def grow_step(state: TreeState, config: ModelConfig, rng: np.random.Generator) -> StepOutcome:
    """Add one vertex, attached to the target chosen among ``d`` fresh draws."""
    candidates = tuple(sample_candidate(state, config, rng) for _ in range(config.d))
    chosen = select_attachment(candidates, state, config, rng)
    chosen_degree = state.degree(chosen)
    max_before = state.max_degree
    new = _attach(state, chosen)
    return StepOutcome(
        step=state.m,
        candidates=candidates,
        chosen=chosen,
        chosen_degree=chosen_degree,
        new_vertex=new,
        max_before=max_before,
        max_after=state.max_degree,
    )


Observer = Callable[[TreeState, StepOutcome, MaxStats], None]


def _stats_from_vector(vec: np.ndarray) -> MaxStats:
    return MaxStats(
        n=int(vec[_kernels.STAT_M_EDGES]),
        max_degree=int(vec[_kernels.STAT_MAX]),
        max_count=int(vec[_kernels.STAT_COUNT]),
        leader=int(vec[_kernels.STAT_LEADER]),
        last_change_step=int(vec[_kernels.STAT_LAST_CHANGE]),
        change_count=int(vec[_kernels.STAT_CHANGES]),
    )


def _stats_to_vector(stats: MaxStats) -> np.ndarray:
    vec = np.empty(_kernels.N_STATS, dtype=np.int64)
    vec[_kernels.STAT_M_EDGES] = stats.n
    vec[_kernels.STAT_MAX] = stats.max_degree
    vec[_kernels.STAT_COUNT] = stats.max_count
    vec[_kernels.STAT_LEADER] = stats.leader
    vec[_kernels.STAT_LAST_CHANGE] = stats.last_change_step
    vec[_kernels.STAT_CHANGES] = stats.change_count
    return vec


def _check_checkpoints(n_steps: int, checkpoints: Iterable[int]) -> list[int]:
    if n_steps < 1:
        raise ValueError(f"n_steps must be at least 1, got {n_steps}")
    if n_steps > MAX_STEPS:
        raise ValueError(f"n_steps must not exceed {MAX_STEPS}")
    points = [int(c) for c in checkpoints]
    if any(b <= a for a, b in zip(points, points[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    if points and not (1 <= points[0] and points[-1] <= n_steps):
        raise ValueError(f"checkpoints must lie in [1, {n_steps}]")
    return points


def run_growth(
    config: ModelConfig,
    n_steps: int,
    checkpoints: Iterable[int] = (),
    observers: Sequence[Observer] = (),
    keep_state: bool = False,
) -> TrajectoryRecord:
    """Grow the tree from one edge to ``n_steps`` edges.

    Without observers the steps run in a compiled loop. With observers every
    step goes through :func:`grow_step` and each observer is called as
    ``observer(state, outcome, stats)``; the trajectory is identical either way.
    """
    points = _check_checkpoints(n_steps, checkpoints)
    rng = make_rng(config.seed)
    state = init_tree(capacity=n_steps)
    stats = initial_max_stats()
    record = TrajectoryRecord(config=config)
    d_metric = config.effective_d
    pending = list(reversed(points))
    if pending and pending[-1] == 1:
        record.snapshots.append(snapshot(stats, d_metric))
        pending.pop()

    if observers:
        while state.m < n_steps:
            outcome = grow_step(state, config, rng)
            stats = update_max_stats(stats, outcome)
            for observer in observers:
                observer(state, outcome, stats)
            if pending and pending[-1] == state.m:
                record.snapshots.append(snapshot(stats, d_metric))
                pending.pop()
    else:
        vec = _stats_to_vector(stats)
        rule = _RULE_CODES[config.choice_rule]
        uniform = config.attachment == "uniform"
        while state.m < n_steps:
            stop = min(state.m + _CHUNK, n_steps)
            if pending:
                stop = min(stop, pending[-1])
            draws = rng.random((stop - state.m, config.d + 1))
            _kernels.advance(state._endpoints, state._degrees, state._hist, vec, draws, rule, uniform)
            state.m = stop
            state.max_degree = int(vec[_kernels.STAT_MAX])
            if pending and pending[-1] == stop:
                record.snapshots.append(snapshot(_stats_from_vector(vec), d_metric))
                pending.pop()
        stats = _stats_from_vector(vec)

    record.final = stats
    if keep_state:
        record.state = state
    return record


def sample_max_degree(config: ModelConfig, n_steps: int, n_runs: int) -> np.ndarray:
    """Final max degree of ``n_runs`` independent runs to ``n_steps`` edges.

    All runs share one stream seeded by ``config.seed``; run ``r`` consumes
    the ``r``-th block of ``(n_steps - 1) * (d + 1)`` doubles.
    """
    if n_steps < 1 or n_runs < 1:
        raise ValueError("n_steps and n_runs must be positive")
    rng = make_rng(config.seed)
    rule = _RULE_CODES[config.choice_rule]
    uniform = config.attachment == "uniform"
    out = []
    runs_per_block = max(1, (1 << 22) // (n_steps * (config.d + 1)))
    done = 0
    while done < n_runs:
        k = min(runs_per_block, n_runs - done)
        draws = rng.random((k, n_steps - 1, config.d + 1))
        out.append(_kernels.final_max_batch(draws, rule, uniform))
        done += k
    return np.concatenate(out)


def export_edge_list(state: TreeState) -> str:
    """Edges in creation order, one ``u<TAB>v`` line each (1-based ids)."""
    if state.m < 1:
        raise ValueError("tree has no edges")
    return "".join(f"{u}\t{v}\n" for u, v in state.edges().tolist())
