"""Command-line entry point: ``choicetree <kind> [--spec FILE] [overrides]``.

Exit status is 0 on success, 2 for an invalid spec and 1 for runtime errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import KINDS, Aggregate, SpecError, build_spec, execute, read_pairs

OVERRIDES = ("d", "rule", "attachment", "steps", "checkpoints", "seeds", "out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="choicetree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind)
        p.add_argument("--spec", type=Path, help="key = value experiment file")
        for key in OVERRIDES:
            p.add_argument(f"--{key}", help=f"override '{key}' from the spec file")
        p.add_argument("--jobs", type=int, default=1, help="seeds run concurrently")
        if kind == "grow":
            p.add_argument("--export-tree", type=Path, help="write the first seed's final tree as an edge list")
    return parser


def _describe(kind, result) -> str:
    if kind in ("grow", "urn"):
        agg = result[-1]
        assert isinstance(agg, Aggregate)
        return "\n".join(f"n={n}  median={med:.6g}  min={lo:.6g}  max={hi:.6g}" for n, med, lo, hi in agg.rows)
    if kind == "table1":
        return "\n".join(f"{a:>12} {r:>4}  median M at n={max(v)}: {v[max(v)]:g}" for (a, r), v in result.items())
    if kind == "hub":
        return "\n".join(
            f"n={c}  fraction_stable={s:.3f}  same_as_final={f:.3f}"
            for c, s, f in zip(result.checkpoints, result.fraction_stable, result.fraction_same_as_final)
        )
    if kind == "xstar":
        return f"d={result.d}  x*={result.x_star:.12g}  q'(x*)={result.derivative:.6g}"
    if kind == "exact":
        return "\n".join(f"M={k}  p={float(p):.10g}" for k, p in result.max_law.items())
    return ""


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.spec.read_text(encoding="utf-8") if args.spec else ""
    except OSError as exc:
        print(f"error: cannot read spec {args.spec}: {exc.strerror}", file=sys.stderr)
        return 2
    try:
        pairs = read_pairs(text)
        if "kind" in pairs and pairs["kind"][0] != args.kind:
            raise SpecError(f"line {pairs['kind'][1]}: kind {pairs['kind'][0]!r} conflicts with subcommand {args.kind!r}")
        pairs["kind"] = (args.kind, None)
        for key in OVERRIDES:
            value = getattr(args, key)
            if value is not None:
                pairs[key] = (value, None)
        spec = build_spec(pairs)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    if getattr(args, "export_tree", None) is not None:
        from dataclasses import replace

        spec = replace(spec, export_tree=args.export_tree)
    try:
        paths, result = execute(spec, n_jobs=args.jobs)
    except Exception as exc:  # surfaced as a runtime failure, exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(_describe(spec.kind, result))
    for path in paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
