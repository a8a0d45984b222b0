"""Command line front end: ``pcm-conley <command> [map file] [options]``.

Exit status: 0 success, 1 usage, parse or validation errors, 2 a Violated
verdict, 3 Unknown or still needing refinement after the allowed retries.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Callable, Optional

import yaml

from .coding import code, format_word
from .fixtures import SEVEN_BRANCH_N, seven_branch_map
from .index_pair import IndexPairC, RefinementNeeded
from .invariance import Status, Verdict
from .mapfile import MapFileError, load_map
from .numerics import RatInterval, as_rational, format_rational
from .pcm_model import (
    PCMap,
    continuous_breakpoints,
    discontinuity_set,
    list_adjoints,
    minimal_partition,
    validate,
)
from .pipeline import Analysis, run_pipeline
from .wazewski import WazewskiReport, check_wazewski

SCHEMA = "pcm-conley/report/1"
EXIT_OK, EXIT_USAGE, EXIT_VIOLATED, EXIT_UNKNOWN = 0, 1, 2, 3
_OUTCOME_EXIT = {"ok": EXIT_OK, "violated": EXIT_VIOLATED, "unknown": EXIT_UNKNOWN, "refine": EXIT_UNKNOWN}
MINIMALITY_NOTE = (
    "minimal among partitions into intervals; unions of non-adjacent pieces are not considered"
)


class UsageError(Exception):
    pass


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _parse_neighborhood(text: str, m: PCMap) -> RatInterval:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"--neighborhood must be 'lo,hi', got {text!r}")
    try:
        N = RatInterval(as_rational(parts[0]), as_rational(parts[1]))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--neighborhood: {exc}") from None
    if not m.space.contains_interval(N):
        raise UsageError(f"neighborhood {N} is not inside the space {m.space}")
    return N


def map_summary(m: PCMap) -> dict:
    violations = validate(m)
    return {
        "name": m.name,
        "space": str(m.space),
        "pieces": [str(p) for p in m.pieces],
        "discontinuities": [format_rational(x) for x in discontinuity_set(m)] if not _structural(violations) else [],
        "valid": not violations,
        "violations": [str(v) for v in violations],
    }


def _structural(violations) -> bool:
    return any(v.axiom != "self-map" for v in violations)


def partition_summary(m: PCMap) -> dict:
    mp = minimal_partition(m)
    return {
        "pieces": [str(p) for p in mp.pieces],
        "piece_count": mp.n,
        "changed": mp.n != m.n,
        "continuous_breakpoints": [format_rational(x) for x in continuous_breakpoints(mp)],
        "note": MINIMALITY_NOTE,
    }


def _verdict(v: Optional[Verdict]) -> Optional[dict]:
    if v is None:
        return None
    return {"status": v.status.value, "evidence": v.evidence}


def analysis_report(a: Analysis) -> dict:
    d = a.digraph
    out = {
        "isolation": _verdict(a.isolation),
        "compatibility": _verdict(a.compatibility),
        "index_pair": None,
        "homology": None,
        "index": a.index.to_dict() if a.index is not None else None,
        "diagnostics": {
            "breakpoint_vertices": len(d.breakpoint_vertices()),
            "breakpoint_vertices_in_cinv": sum(1 for v in a.inv.cinv if d.vertices[v].degenerate),
            "commutation_defects": len(d.commutation_defects()),
        },
        "resources": {
            "vertices": len(d),
            "edges": sum(len(s) for s in d.succ),
            "exit_vertices": len(d.exits),
            "pruning_rounds": a.inv.rounds,
        },
    }
    if isinstance(a.pair, IndexPairC):
        out["index_pair"] = {"cinv": len(a.pair.cinv), "p1": len(a.pair.p1), "p0": len(a.pair.p0)}
    elif isinstance(a.pair, RefinementNeeded):
        out["index_pair"] = {
            "refinement_needed": a.pair.reason,
            "violations": [
                {"condition": c.condition, "vertex": c.vertex, "message": c.message}
                for c in a.pair.violations[:20]
            ],
        }
    if a.homology is not None:
        out["homology"] = {
            "components": a.component_count,
            "betti": {str(k): v for k, v in a.homology.betti.items()},
            "torsion": {str(k): v for k, v in a.homology.torsion.items()},
        }
        if isinstance(a.graded, RefinementNeeded):
            out["homology"]["index_map"] = {"refinement_needed": a.graded.reason}
    return out


def refine(
    step: Callable[[int, int], Analysis], k: int, depth: int, max_refinements: int
) -> tuple[Analysis, list]:
    """Retry at (depth + 1, k + 1) while the outcome is Unknown or needs refinement."""
    attempts = []
    for _ in range(max_refinements + 1):
        a = step(k, depth)
        attempts.append(
            {"code_depth": k, "grid_depth": depth, "outcome": a.outcome, "components": a.component_count}
        )
        if a.outcome in ("ok", "violated"):
            break
        k, depth = k + 1, depth + 1
    return a, attempts


def _emit_files(args, a: Analysis) -> None:
    if args.emit_dot:
        Path(args.emit_dot).write_text(a.digraph.to_dot())
    if args.emit_csv:
        marks = {"cinv": a.inv.cinv}
        if isinstance(a.pair, IndexPairC):
            marks.update(p1=a.pair.p1, p0=a.pair.p0)
        Path(args.emit_csv).write_text(a.digraph.to_csv(marks))


def _base_report(command: str, m: PCMap) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "map": map_summary(m),
        "minimal_partition": partition_summary(m),
        "adjoints": len(list_adjoints(m)),
    }


def _require_usable(m: PCMap) -> None:
    bad = [v for v in validate(m) if v.axiom != "self-map"]
    if bad:
        raise UsageError("map is not a valid partition: " + "; ".join(map(str, bad)))


def _run_analysis(command: str, m: PCMap, N: RatInterval, args) -> tuple[dict, int]:
    _require_usable(m)
    report = _base_report(command, m)
    report["neighborhood"] = str(N)
    report["params"] = {
        "code_depth": args.code_depth,
        "grid_depth": args.grid_depth,
        "max_period": args.max_period,
        "backward_bound": args.backward_bound,
        "max_refinements": args.max_refinements,
    }

    def step(k, depth):
        return run_pipeline(
            m, N, k, depth, backward_bound=args.backward_bound, max_period=args.max_period
        )

    a, attempts = refine(step, args.code_depth, args.grid_depth, args.max_refinements)
    report["attempts"] = attempts
    report.update(analysis_report(a))
    outcome = a.outcome
    if command == "isolate":
        statuses = [v.status for v in (a.isolation, a.compatibility) if v is not None]
        outcome = (
            "violated" if Status.VIOLATED in statuses
            else "ok" if statuses and all(s is Status.CERTIFIED for s in statuses) and len(statuses) == 2
            else "unknown"
        )
        for key in ("index_pair", "homology", "index"):
            report.pop(key)
    if command in ("wazewski", "paper-example"):
        w: WazewskiReport = check_wazewski(m, N, a.k, a.depth, args.max_period, args.backward_bound, analysis=a)
        report["wazewski"] = w.describe()
    report["outcome"] = outcome
    _emit_files(args, a)
    return report, _OUTCOME_EXIT[outcome]


def cmd_validate(m: PCMap, args) -> tuple[dict, int]:
    report = {"schema": SCHEMA, "command": "validate", "map": map_summary(m)}
    return report, EXIT_OK if report["map"]["valid"] else EXIT_USAGE


def cmd_partition(m: PCMap, args) -> tuple[dict, int]:
    _require_usable(m)
    report = {"schema": SCHEMA, "command": "partition", "map": map_summary(m)}
    report["minimal_partition"] = partition_summary(m)
    return report, EXIT_OK


def cmd_adjoints(m: PCMap, args) -> tuple[dict, int]:
    _require_usable(m)
    adjoints = list_adjoints(m)
    report = {
        "schema": SCHEMA,
        "command": "adjoints",
        "discontinuities": [format_rational(x) for x in discontinuity_set(m)],
        "count": len(adjoints),
        "adjoints": [g.describe(m) for g in adjoints],
    }
    return report, EXIT_OK


def cmd_code(m: PCMap, args) -> tuple[dict, int]:
    _require_usable(m)
    if not args.points:
        raise UsageError("code needs at least one --point")
    words = {}
    for text in args.points:
        try:
            x = as_rational(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"--point {text!r}: {exc}") from None
        words[format_rational(x)] = format_word(code(m, None, x, args.code_depth))
    return {"schema": SCHEMA, "command": "code", "code_depth": args.code_depth, "itineraries": words}, EXIT_OK


def _text(report: dict) -> str:
    if report.get("command") == "code":
        return "".join(f"{x}: {w}\n" for x, w in report["itineraries"].items())
    return yaml.safe_dump(report, sort_keys=False, default_flow_style=None, width=100)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcm-conley", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_map=True, needs_n=False):
        if needs_map:
            p.add_argument("map_file", help="map definition (YAML or JSON)")
        if needs_n:
            p.add_argument("--neighborhood", required=needs_map, help='isolating candidate "lo,hi"')
        p.add_argument("--format", choices=("text", "json"), default="text")

    for name in ("validate", "partition", "adjoints"):
        common(sub.add_parser(name))
    p = sub.add_parser("code", help="itineraries of points")
    common(p)
    p.add_argument("--point", dest="points", action="append", help="exact point, repeatable")
    p.add_argument("--code-depth", type=_nonneg, default=5)
    for name, needs_map in (("isolate", True), ("index", True), ("wazewski", True), ("paper-example", False)):
        p = sub.add_parser(name)
        common(p, needs_map=needs_map, needs_n=True)
        p.add_argument("--grid-depth", type=_nonneg, default=4)
        p.add_argument("--code-depth", type=_nonneg, default=3)
        p.add_argument("--max-period", type=_nonneg, default=8)
        p.add_argument("--backward-bound", type=_nonneg, default=12)
        p.add_argument("--max-refinements", type=_nonneg, default=3)
        p.add_argument("--emit-dot", metavar="PATH")
        p.add_argument("--emit-csv", metavar="PATH")
    return parser


_COMMANDS = {"validate": cmd_validate, "partition": cmd_partition, "adjoints": cmd_adjoints, "code": cmd_code}


def run(args: argparse.Namespace) -> tuple[dict, int]:
    if args.command == "paper-example":
        m = seven_branch_map()
        N = _parse_neighborhood(args.neighborhood, m) if args.neighborhood else SEVEN_BRANCH_N
        return _run_analysis(args.command, m, N, args)
    m = load_map(args.map_file)
    if args.command in _COMMANDS:
        return _COMMANDS[args.command](m, args)
    if args.code_depth < 1:
        raise UsageError("--code-depth must be at least 1")
    return _run_analysis(args.command, m, _parse_neighborhood(args.neighborhood, m), args)


def main(argv: Optional[list] = None) -> int:
    started = time.perf_counter()
    args = build_parser().parse_args(argv)
    try:
        report, status = run(args)
    except (MapFileError, UsageError, OSError) as exc:
        print(f"pcm-conley: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(_text(report))
        print(f"# elapsed {time.perf_counter() - started:.2f}s", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
