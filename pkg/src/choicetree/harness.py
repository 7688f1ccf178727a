"""Multi-seed experiments and their CSV outputs.

Experiments are described by a flat ``key = value`` text file::

    # d = 3 max-choice, twenty seeds
    kind = grow
    d = 3
    steps = 10^6
    checkpoints = geometric:10^4,10
    seeds = 1..20
    out = results/d3

Keys: kind, d, rule, attachment, steps, checkpoints, seeds, out.
Defaults: d = 2, rule = max, attachment = preferential, steps = 10^6
(6 for ``exact``), checkpoints = geometric:10^4,10, seeds = 1..20,
out = results.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .observables import Snapshot
from .theory import exact_distribution, solve_x_star
from .theory.urn import UrnState, urn_trace
from .tree_model import ATTACHMENTS, CHOICE_RULES, ModelConfig, export_edge_list, run_growth

KINDS = ("grow", "urn", "xstar", "exact", "table1", "hub")
STOCHASTIC_KINDS = ("grow", "urn", "table1", "hub")
KEYS = ("kind", "d", "rule", "attachment", "steps", "checkpoints", "seeds", "out")
DEFAULTS = {
    "d": "2",
    "rule": "max",
    "attachment": "preferential",
    "checkpoints": "geometric:10^4,10",
    "seeds": "1..20",
    "out": "results",
}

TRAJECTORY_HEADER = ["seed", "n", "M", "L", "leader", "change_count", "scaled_metric"]
SUMMARY_HEADER = ["n", "median_scaled", "min_scaled", "max_scaled"]
TABLE1_RULES = ("max", "none", "min")
TABLE1_ORDERS = {
    ("preferential", "max"): "4n/log n",
    ("preferential", "none"): "c*n^(1/2)",
    ("preferential", "min"): "log log n/log 2 + O(1)",
    ("uniform", "max"): "O(log n)",
    ("uniform", "none"): "O(log n)",
    ("uniform", "min"): "O(log log n)",
}


class SpecError(ValueError):
    """Malformed or invalid experiment specification."""


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    model: ModelConfig = field(default_factory=ModelConfig)
    n_steps: int = 10**6
    checkpoints: tuple[int, ...] = ()
    seeds: tuple[int, ...] = ()
    out: Path = Path("results")
    export_tree: Path | None = None


def fmt(x) -> str:
    """Render a CSV number: integers verbatim, reals to 10 significant digits."""
    if isinstance(x, float):
        return format(x, ".10g")
    return str(x)


def parse_int(text: str) -> int:
    """Integer literal, also accepting ``10^6`` and ``1e6``."""
    text = text.strip()
    if "^" in text:
        base, exp = text.split("^", 1)
        return int(base) ** int(exp)
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if not value.is_integer():
            raise
        return int(value)


def parse_seeds(text: str) -> tuple[int, ...]:
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            seeds.extend(range(parse_int(lo), parse_int(hi) + 1))
        elif part:
            seeds.append(parse_int(part))
    return tuple(seeds)


def parse_checkpoints(text: str, n_steps: int) -> tuple[int, ...]:
    text = text.strip()
    if text.startswith("geometric:"):
        start, factor = (parse_int(t) for t in text[len("geometric:") :].split(","))
        if start < 1 or factor < 2:
            raise ValueError("geometric schedule needs start >= 1 and factor >= 2")
        points = []
        c = start
        while c <= n_steps:
            points.append(c)
            c *= factor
        return tuple(points)
    return tuple(parse_int(t) for t in text.split(",") if t.strip())


def read_pairs(text: str) -> dict[str, tuple[str, int]]:
    """Map each key to (raw value, line number). Later lines win."""
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise SpecError(f"line {lineno}: unknown key {key!r}")
        if not value:
            raise SpecError(f"line {lineno}: empty value for {key!r}")
        pairs[key] = (value, lineno)
    return pairs


def build_spec(pairs: dict[str, tuple[str, int]]) -> ExperimentSpec:
    def get(key):
        if key in pairs:
            return pairs[key]
        if key == "steps":
            return ("6" if pairs.get("kind", ("",))[0] == "exact" else "10^6"), None
        return DEFAULTS.get(key), None

    def fail(key, line, msg):
        where = f"line {line}: " if line else ""
        raise SpecError(f"{where}{key}: {msg}")

    kind, line = get("kind")
    if kind not in KINDS:
        fail("kind", line, f"must be one of {KINDS}, got {kind!r}")

    values = {}
    for key in ("d", "steps"):
        raw, line = get(key)
        try:
            values[key] = parse_int(raw)
        except ValueError:
            fail(key, line, f"not an integer: {raw!r}")
        if values[key] < 1:
            fail(key, line, f"must be at least 1, got {values[key]}")
    rule, line = get("rule")
    if rule not in CHOICE_RULES:
        fail("rule", line, f"must be one of {CHOICE_RULES}, got {rule!r}")
    attachment, line = get("attachment")
    if attachment not in ATTACHMENTS:
        fail("attachment", line, f"must be one of {ATTACHMENTS}, got {attachment!r}")

    raw, line = get("seeds")
    try:
        seeds = parse_seeds(raw)
    except ValueError:
        fail("seeds", line, f"cannot parse {raw!r}")
    if kind in STOCHASTIC_KINDS and not seeds:
        fail("seeds", line, "seed list is empty")
    if any(not 0 <= s < 2**64 for s in seeds):
        fail("seeds", line, "seeds must be 64-bit unsigned integers")

    raw, line = get("checkpoints")
    try:
        checkpoints = parse_checkpoints(raw, values["steps"])
    except ValueError:
        fail("checkpoints", line, f"cannot parse {raw!r}")
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        fail("checkpoints", line, "must be strictly increasing")
    if checkpoints and not (1 <= checkpoints[0] and checkpoints[-1] <= values["steps"]):
        fail("checkpoints", line, f"must lie in [1, {values['steps']}]")
    if kind in ("grow", "urn", "table1") and not checkpoints:
        fail("checkpoints", line, f"no checkpoint falls within {values['steps']} steps")
    if kind == "hub" and len(checkpoints) < 2:
        fail("checkpoints", line, "hub report needs at least two checkpoints")
    if kind == "exact" and values["steps"] > 12:
        fail("steps", get("steps")[1], "exact enumeration is capped at 12 edges")

    model = ModelConfig(d=values["d"], choice_rule=rule, attachment=attachment)
    return ExperimentSpec(
        kind=kind,
        model=model,
        n_steps=values["steps"],
        checkpoints=checkpoints,
        seeds=seeds,
        out=Path(get("out")[0]),
    )


def parse_spec(text: str) -> ExperimentSpec:
    """Parse and validate a ``key = value`` experiment description."""
    return build_spec(read_pairs(text))


@dataclass
class RunSummary:
    seed: int
    final_max: int
    final_count: int
    snapshots: list[Snapshot]
    change_count: int
    last_change_step: int
    seconds: float

    @property
    def leader_trace(self) -> list[int]:
        return [s.leader for s in self.snapshots]


@dataclass
class Aggregate:
    """Median, min and max of the scaled metric across seeds, per checkpoint."""

    rows: list[tuple[int, float, float, float]]


def _run_seed(spec: ExperimentSpec, seed: int) -> RunSummary:
    config = spec.model.with_seed(seed)
    keep = spec.export_tree is not None and seed == spec.seeds[0]
    t0 = time.perf_counter()
    record = run_growth(config, spec.n_steps, spec.checkpoints, keep_state=keep)
    seconds = time.perf_counter() - t0
    if keep:
        write_text(spec.export_tree, export_edge_list(record.state))
    final = record.final
    return RunSummary(
        seed=seed,
        final_max=final.max_degree,
        final_count=final.max_count,
        snapshots=record.snapshots,
        change_count=final.change_count,
        last_change_step=final.last_change_step,
        seconds=seconds,
    )


def _run_urn_seed(spec: ExperimentSpec, seed: int) -> RunSummary:
    t0 = time.perf_counter()
    trace = urn_trace(UrnState(), spec.model.d, spec.n_steps, seed, list(spec.checkpoints))
    snaps = [
        Snapshot(n=step, max_degree=black, max_count=1, leader=0, change_count=0, scaled_metric=black / step)
        for step, black, _ in trace
    ]
    last = snaps[-1]
    return RunSummary(seed, last.max_degree, 1, snaps, 0, 0, time.perf_counter() - t0)


def aggregate(summaries: Sequence[RunSummary]) -> Aggregate:
    rows = []
    for i, snap in enumerate(summaries[0].snapshots):
        values = [s.snapshots[i].scaled_metric for s in summaries]
        rows.append((snap.n, statistics.median(values), min(values), max(values)))
    return Aggregate(rows)


def run_experiment(spec: ExperimentSpec, n_jobs: int = 1) -> list:
    """Run every seed of a grow, hub or urn experiment.

    Returns one :class:`RunSummary` per seed, ordered by seed position in the
    spec, followed by an :class:`Aggregate`.
    """
    if spec.kind in ("grow", "hub"):
        runner = _run_seed
    elif spec.kind == "urn":
        runner = _run_urn_seed
    else:
        raise ValueError(f"run_experiment does not handle kind {spec.kind!r}")
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            summaries = list(pool.map(lambda s: runner(spec, s), spec.seeds))
    else:
        summaries = [runner(spec, s) for s in spec.seeds]
    return summaries + [aggregate(summaries)]


def write_text(path: Path, text: str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def emit_csv(results: Sequence, spec: ExperimentSpec) -> list[Path]:
    """Write ``trajectory.csv`` and ``summary.csv`` under ``spec.out``."""
    summaries = [r for r in results if isinstance(r, RunSummary)]
    agg = next((r for r in results if isinstance(r, Aggregate)), None) or aggregate(summaries)
    rows = (
        (s.seed, snap.n, snap.max_degree, snap.max_count, snap.leader, snap.change_count, snap.scaled_metric)
        for s in summaries
        for snap in s.snapshots
    )
    out = Path(spec.out)
    paths = [out / "trajectory.csv", out / "summary.csv"]
    write_text(paths[0], csv_text(TRAJECTORY_HEADER, rows))
    write_text(paths[1], csv_text(SUMMARY_HEADER, agg.rows))
    return paths


def emit_urn(results: Sequence, spec: ExperimentSpec) -> list[Path]:
    """Write ``urn.csv`` (per seed and checkpoint) and ``summary.csv``."""
    summaries = [r for r in results if isinstance(r, RunSummary)]
    rows = (
        (s.seed, snap.n, snap.max_degree, 2 * snap.n + 2 - snap.max_degree, snap.scaled_metric)
        for s in summaries
        for snap in s.snapshots
    )
    out = Path(spec.out)
    paths = [out / "urn.csv", out / "summary.csv"]
    write_text(paths[0], csv_text(["seed", "step", "black", "white", "black_fraction"], rows))
    write_text(paths[1], csv_text(SUMMARY_HEADER, aggregate(summaries).rows))
    return paths


def table1_medians(spec: ExperimentSpec, n_jobs: int = 1) -> dict[tuple[str, str], dict[int, float]]:
    """Median max degree per (attachment, rule) cell at each checkpoint, d = 2."""
    points = tuple(spec.checkpoints)
    if not points or points[-1] != spec.n_steps:
        points = points + (spec.n_steps,)
    cells = {}
    for attachment in ATTACHMENTS:
        for rule in TABLE1_RULES:
            model = ModelConfig(d=2, choice_rule=rule, attachment=attachment)
            sub = replace(spec, kind="grow", model=model, checkpoints=points, export_tree=None)
            summaries = run_experiment(sub, n_jobs)[:-1]
            cells[attachment, rule] = {
                n: statistics.median(s.snapshots[i].max_degree for s in summaries) for i, n in enumerate(points)
            }
    return cells


def _table1_prediction(attachment: str, rule: str, n: int) -> str:
    if attachment != "preferential":
        return ""
    if rule == "max":
        return fmt(4 * n / math.log(n))
    if rule == "min":
        return fmt(math.log(math.log(n)) / math.log(2))
    return ""


def emit_table1(spec: ExperimentSpec, n_jobs: int = 1) -> tuple[list[Path], dict]:
    """Write the six-cell comparison ``table1.csv`` plus per-checkpoint medians."""
    cells = table1_medians(spec, n_jobs)
    n = spec.n_steps
    grid = (
        (a, r, cells[a, r][n], TABLE1_ORDERS[a, r], _table1_prediction(a, r, n))
        for a in ATTACHMENTS
        for r in TABLE1_RULES
    )
    long = ((a, r, k, v) for (a, r), by_n in cells.items() for k, v in by_n.items())
    out = Path(spec.out)
    paths = [out / "table1.csv", out / "table1_checkpoints.csv"]
    write_text(
        paths[0],
        csv_text(["attachment", "rule", "median_max_degree", "predicted_order", "leading_term"], grid),
    )
    write_text(paths[1], csv_text(["attachment", "rule", "n", "median_max_degree"], long))
    return paths, cells


@dataclass
class HubReport:
    checkpoints: tuple[int, ...]
    summaries: list[RunSummary]
    fraction_stable: list[float]
    fraction_same_as_final: list[float]


def hub_report(summaries: Sequence[RunSummary], checkpoints: Sequence[int]) -> HubReport:
    n_seeds = len(summaries)
    stable = [sum(s.last_change_step <= c for s in summaries) / n_seeds for c in checkpoints]
    same = [
        sum(s.snapshots[i].leader == s.snapshots[-1].leader for s in summaries) / n_seeds
        for i in range(len(checkpoints))
    ]
    return HubReport(tuple(checkpoints), list(summaries), stable, same)


def emit_hub_report(spec: ExperimentSpec, n_jobs: int = 1) -> tuple[list[Path], HubReport]:
    """Leader identity at each checkpoint per seed, and leader stability fractions."""
    if len(spec.checkpoints) < 2:
        raise ValueError("hub report needs at least two checkpoints")
    summaries = run_experiment(replace(spec, kind="hub"), n_jobs)[:-1]
    report = hub_report(summaries, spec.checkpoints)
    header = ["seed"] + [f"leader_at_{c}" for c in spec.checkpoints] + ["last_change_step", "change_count"]
    rows = ([s.seed, *s.leader_trace, s.last_change_step, s.change_count] for s in summaries)
    out = Path(spec.out)
    paths = [out / "hub.csv", out / "hub_summary.csv"]
    write_text(paths[0], csv_text(header, rows))
    write_text(
        paths[1],
        csv_text(
            ["n", "fraction_stable", "fraction_same_as_final"],
            zip(spec.checkpoints, report.fraction_stable, report.fraction_same_as_final),
        ),
    )
    return paths, report


def emit_xstar(spec: ExperimentSpec) -> list[Path]:
    res = solve_x_star(spec.model.d)
    path = Path(spec.out) / "xstar.csv"
    write_text(
        path,
        csv_text(
            ["d", "x_star", "residual", "derivative", "iterations"],
            [(res.d, res.x_star, res.residual, res.derivative, res.iterations)],
        ),
    )
    return [path]


def emit_exact(spec: ExperimentSpec) -> list[Path]:
    dist = exact_distribution(spec.n_steps, spec.model)
    out = Path(spec.out)
    paths = [out / "exact_max.csv", out / "exact_multisets.csv"]
    write_text(
        paths[0],
        csv_text(["M", "probability", "exact"], ((k, float(p), str(p)) for k, p in dist.max_law.items())),
    )
    multisets = sorted(dist.multisets.items(), reverse=True)
    write_text(
        paths[1],
        csv_text(
            ["degrees", "probability", "exact"],
            ((" ".join(map(str, k)), float(p), str(p)) for k, p in multisets),
        ),
    )
    return paths


def execute(spec: ExperimentSpec, n_jobs: int = 1):
    """Run ``spec`` and write its output files; returns (paths, in-memory result)."""
    if spec.kind == "grow":
        results = run_experiment(spec, n_jobs)
        return emit_csv(results, spec), results
    if spec.kind == "urn":
        results = run_experiment(spec, n_jobs)
        return emit_urn(results, spec), results
    if spec.kind == "table1":
        return emit_table1(spec, n_jobs)
    if spec.kind == "hub":
        return emit_hub_report(spec, n_jobs)
    if spec.kind == "xstar":
        return emit_xstar(spec), solve_x_star(spec.model.d)
    if spec.kind == "exact":
        return emit_exact(spec), exact_distribution(spec.n_steps, spec.model)
    raise ValueError(f"unknown kind {spec.kind!r}")
