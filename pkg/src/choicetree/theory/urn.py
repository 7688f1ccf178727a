"""Two-colour urn with d draws per step, mirroring a unique maximum-degree vertex.

Black balls stand for the hub's degree, white balls for the remaining
endpoints. Each step samples d balls with replacement; one black and one white
ball are added if any draw is black, two white balls otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..tree_model import make_rng

_CHUNK = 1 << 16


@dataclass(frozen=True)
class UrnState:
    black: int = 1
    white: int = 1
    steps: int = 0

    @property
    def total(self) -> int:
        return self.black + self.white


def urn_increment_probability(urn: UrnState, d: int) -> float:
    """Chance that at least one of d draws is black."""
    return 1.0 - (urn.white / urn.total) ** d


def urn_step(urn: UrnState, d: int, rng: np.random.Generator) -> UrnState:
    if urn.total < 1:
        raise ValueError("urn is empty")
    draws = rng.random(d)
    if (draws * urn.total < urn.black).any():
        return UrnState(urn.black + 1, urn.white + 1, urn.steps + 1)
    return UrnState(urn.black, urn.white + 2, urn.steps + 1)


def geometric_checkpoints(n_steps: int, start: int = 10, factor: int = 10) -> list[int]:
    points = []
    c = start
    while c <= n_steps:
        points.append(c)
        c *= factor
    return points


def urn_trace(
    initial: UrnState,
    d: int,
    n_steps: int,
    seed: int,
    checkpoints: list[int] | None = None,
) -> list[tuple[int, int, int]]:
    """(steps, black, white) after each checkpoint; checkpoints count steps from ``initial``."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be at least 1, got {n_steps}")
    if initial.total < 1:
        raise ValueError("urn is empty")
    points = geometric_checkpoints(n_steps) if checkpoints is None else sorted(checkpoints)
    rng = make_rng(seed)
    counts = np.array([initial.black, initial.white, initial.steps], dtype=np.int64)
    trace = []
    done = 0
    pending = list(reversed(points))
    while done < n_steps:
        stop = min(done + _CHUNK, n_steps)
        if pending:
            stop = min(stop, pending[-1])
        _kernels.urn_advance(counts, rng.random((stop - done, d)))
        done = stop
        if pending and pending[-1] == done:
            trace.append((int(counts[2]), int(counts[0]), int(counts[1])))
            pending.pop()
    return trace


def run_urn(
    initial: UrnState,
    d: int,
    n_steps: int,
    seed: int,
    checkpoints: list[int] | None = None,
) -> list[tuple[int, float]]:
    """Iterate the urn ``n_steps`` times; returns (step, black/step) at checkpoints.

    Checkpoints default to powers of ten. Consumes the stream exactly like
    repeated :func:`urn_step` calls.
    """
    return [(step, black / step) for step, black, _ in urn_trace(initial, d, n_steps, seed, checkpoints)]
