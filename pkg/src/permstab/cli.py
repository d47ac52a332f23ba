"""Command-line entry point: ``permstab {stabilize,cone,repair,bench}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import io
from .cone import DEFAULT_BUDGET, integer_kernel_point
from .correct import stabilize
from .errors import PermstabError
from .gog import defect
from .harness import bench_csv, expand_bench_config, make_rng
from .schreier import AlmostAutomorphism, SchreierGraph, repair


def _cmd_stabilize(args) -> int:
    gog = io.load_gog(args.gog)
    rho = io.load_action(gog, args.action)
    rng = None if args.seed is None else make_rng(args.seed)
    report = stabilize(rho, budget=args.budget, rng=rng)
    text = io.write_json(args.out, io.action_to_json(report.output_action))
    if not args.out:
        sys.stdout.write(text)
    if args.report:
        io.write_json(args.report, report.to_json())
    out_defect = defect(report.output_action)
    print(
        f"defect {report.input_defect} -> {out_defect}, distance {report.distance}"
        + (" (fallback)" if report.fallback else ""),
        file=sys.stderr,
    )
    return 0 if out_defect == 0 else 1


def _cmd_cone(args) -> int:
    problem = io.cone_problem_from_json(io.read_json(args.input))
    sol = integer_kernel_point(problem, budget=args.budget)
    text = io.write_json(args.out, sol.to_json())
    if not args.out:
        sys.stdout.write(text)
    return 0 if all(sol.certified.values()) else 1


def _cmd_repair(args) -> int:
    graph = SchreierGraph.from_json(io.read_json(args.graph))
    data = io.read_json(args.automorphism)
    if args.n is not None:
        data = dict(data, n=args.n)
    alpha = AlmostAutomorphism.from_json(graph, data)
    rep = repair(alpha, budget=args.budget)
    text = io.write_json(args.out, rep.to_json())
    if not args.out:
        sys.stdout.write(text)
    print(f"edge diff {rep.edge_diff}, vertex diff {rep.vertex_diff}, order {rep.exact_order}", file=sys.stderr)
    return 0


def _cmd_bench(args) -> int:
    configs = expand_bench_config(io.read_json(args.config))
    text = bench_csv(configs)
    if args.out and args.out != "-":
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permstab", description="Exact correction of almost actions of graphs of finite groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stabilize", help="correct an almost action to an exact one")
    p.add_argument("--gog", required=True, help="graph-of-groups JSON file or built-in name (e.g. SL2Z)")
    p.add_argument("--action", required=True, help="action JSON file")
    p.add_argument("--report", help="write the correction report here")
    p.add_argument("--out", help="write the corrected action here (default stdout)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="cone search node budget")
    p.add_argument("--seed", type=int, help="randomise matching choices with this seed")
    p.set_defaults(func=_cmd_stabilize)

    p = sub.add_parser("cone", help="nearest point of the positive cone in a kernel lattice")
    p.add_argument("--input", required=True, help="matrix + vector JSON")
    p.add_argument("--out", help="write the solution here (default stdout)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=_cmd_cone)

    p = sub.add_parser("repair", help="repair an almost automorphism of a Schreier graph")
    p.add_argument("--graph", required=True, help="Schreier graph JSON")
    p.add_argument("--automorphism", required=True, help="automorphism JSON")
    p.add_argument("--n", type=int, help="override the target order")
    p.add_argument("--out", help="write the result here (default stdout)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=_cmd_repair)

    p = sub.add_parser("bench", help="run randomized trials and emit CSV")
    p.add_argument("--config", required=True, help="bench config JSON")
    p.add_argument("--out", help="CSV destination (default stdout)")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PermstabError, ValueError, KeyError, OSError) as exc:
        print(f"permstab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
