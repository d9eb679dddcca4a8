"""Command-line front end: realize, synth, plan, verify, gen."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

from .formula import FormulaError, load_spec, preprocess, render_qdimacs
from .oracle import TooLarge, gen_family, gen_random, verify_witnesses
from .planner import (GradedProjectJoinTree, HEURISTICS, InvalidDecomposition, PlanConfig,
                      PlanningError, PlanningExhausted, pjt_width, plan)
from .pipeline import (MODES, PLANNING_EXHAUSTED, STATS_FIELDS, TIMEOUT, call_with_big_stack,
                       run as run_pipeline)
from .synth import emit_witnesses, parse_witnesses, witness_dimacs

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_PLANNING = 10
EXIT_TIMEOUT = 11


def _shared(p: argparse.ArgumentParser, execute: bool = True) -> None:
    p.add_argument("instance", help="QDIMACS file")
    p.add_argument("--sidecar", help="JSON file with 'inputs'/'outputs' lists")
    p.add_argument("--plan-timeout-ms", type=int, default=200_000)
    p.add_argument("--width-target", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--heuristic", choices=HEURISTICS, default="min-fill")
    p.add_argument("--emit-tree", metavar="FILE", help="write the chosen tree as JSON")
    p.add_argument("--stats", choices=("json", "csv"), help="print machine-readable stats")
    if execute:
        p.add_argument("--exec-timeout-ms", type=int, default=7_200_000)
        p.add_argument("--mode", choices=MODES, default="dp")
        p.add_argument("--tree", metavar="FILE", help="use this tree instead of planning")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zddsynth",
                                     description="Realizability and witness synthesis for forall-exists CNF")
    sub = parser.add_subparsers(dest="command", required=True)
    _shared(sub.add_parser("realize", help="classify an instance"))
    p = sub.add_parser("synth", help="classify and build witnesses")
    _shared(p)
    p.add_argument("--out", metavar="FILE", help="witness JSON (default: standard output)")
    p.add_argument("--emit-dimacs-dir", metavar="DIR", help="one DIMACS CNF per output")
    _shared(sub.add_parser("plan", help="plan a graded tree only"), execute=False)
    p = sub.add_parser("verify", help="check witnesses by enumeration")
    p.add_argument("instance")
    p.add_argument("witnesses", help="witness JSON written by synth")
    p.add_argument("--sidecar")
    p = sub.add_parser("gen", help="write a generated instance as QDIMACS")
    p.add_argument("family", choices=("chain", "mutex-like", "qshifter-like", "random"))
    p.add_argument("n", type=int, nargs="?", default=1, help="family size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--num-x", type=int, default=4)
    p.add_argument("--num-y", type=int, default=4)
    p.add_argument("--num-clauses", type=int, default=10)
    p.add_argument("--max-width", type=int, default=3)
    p.add_argument("--pure-x", action="store_true", help="allow input-only clauses")
    p.add_argument("--out", metavar="FILE")
    return parser


def _plan_config(args) -> PlanConfig:
    return PlanConfig(plan_timeout=args.plan_timeout_ms / 1000.0, width_target=args.width_target,
                      seed=args.seed, heuristic=args.heuristic)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _print_stats(stats: dict, fmt: str | None) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(stats, sort_keys=True) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=STATS_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerow({k: stats[k] for k in STATS_FIELDS})
        sys.stdout.write(buf.getvalue())


def _load(args):
    t0 = time.monotonic()
    spec = load_spec(args.instance, args.sidecar)
    return spec, round((time.monotonic() - t0) * 1000.0, 3)


def _exit_for(outcome: str) -> int:
    return {PLANNING_EXHAUSTED: EXIT_PLANNING, TIMEOUT: EXIT_TIMEOUT}.get(outcome, EXIT_OK)


def cmd_execute(args, synthesize: bool) -> int:
    spec, parse_ms = _load(args)
    tree = None
    if args.tree:
        with open(args.tree) as fh:
            tree = GradedProjectJoinTree.from_json(json.load(fh))
    result = run_pipeline(spec, mode=args.mode, plan_config=_plan_config(args),
                          exec_timeout=args.exec_timeout_ms / 1000.0, synthesize=synthesize,
                          tree=tree, parse_ms=parse_ms)
    stats = result.stats.as_dict()
    print(f"{spec.name}: {result.outcome}")
    print(f"  mode={args.mode} pjt_width={stats['pjt_width']} peak_nodes={stats['peak_nodes']} "
          f"total_ms={stats['total_ms']}")
    if args.emit_tree and result.tree is not None:
        _write(args.emit_tree, _dump_json(result.tree.to_json()))
    if synthesize and result.kind is not None:
        doc = {"outcome": result.outcome, "instance": spec.name,
               "inputs": sorted(spec.inputs), "outputs": sorted(spec.outputs),
               "synth_order": [], "witnesses": {}}
        if result.witnesses is not None:
            doc = emit_witnesses(result.witnesses, result.spec, result.manager)
            doc["outcome"] = result.outcome
        if args.out:
            _write(args.out, _dump_json(doc))
        else:
            sys.stdout.write(_dump_json(doc))
        if args.emit_dimacs_dir and result.witnesses is not None:
            os.makedirs(args.emit_dimacs_dir, exist_ok=True)
            for y in sorted(spec.outputs):
                _write(os.path.join(args.emit_dimacs_dir, f"y{y}.cnf"),
                       witness_dimacs(doc, y, spec.num_props))
    _print_stats(stats, args.stats)
    return _exit_for(result.outcome)


def cmd_plan(args) -> int:
    spec, parse_ms = _load(args)
    pre = preprocess(spec)
    t0 = time.monotonic()
    try:
        tree, report = plan(pre, _plan_config(args))
    except PlanningExhausted:
        print(f"{spec.name}: {PLANNING_EXHAUSTED}")
        return EXIT_PLANNING
    plan_ms = round((time.monotonic() - t0) * 1000.0, 3)
    width = pjt_width(tree, pre)
    print(f"{spec.name}: pjt_width={width} met_target={report.met_target} "
          f"trees_examined={report.trees_examined}")
    if args.emit_tree:
        _write(args.emit_tree, _dump_json(tree.to_json()))
    _print_stats({"instance": spec.name, "mode": "plan", "outcome": "PLANNED",
                  "parse_ms": parse_ms, "plan_ms": plan_ms, "exec_ms": 0.0,
                  "total_ms": round(parse_ms + plan_ms, 3), "pjt_width": width,
                  "peak_nodes": 0}, args.stats)
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = load_spec(args.instance, args.sidecar)
    with open(args.witnesses) as fh:
        doc = json.load(fh)
    bad = verify_witnesses(spec, parse_witnesses(doc))
    if bad is None:
        print(f"{spec.name}: witnesses verified")
        return EXIT_OK
    print(f"{spec.name}: counterexample, true inputs = {sorted(bad)}")
    return EXIT_FAIL


def cmd_gen(args) -> int:
    if args.family == "random":
        spec = gen_random(args.num_x, args.num_y, args.num_clauses, args.max_width, args.seed,
                          allow_pure_x=args.pure_x)
    else:
        spec = gen_family(args.family, args.n)
    _write(args.out, render_qdimacs(spec, comment=spec.name))
    return EXIT_OK


def dispatch(args) -> int:
    if args.command in ("realize", "synth"):
        return cmd_execute(args, synthesize=args.command == "synth")
    if args.command == "plan":
        return cmd_plan(args)
    if args.command == "verify":
        return cmd_verify(args)
    return cmd_gen(args)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return call_with_big_stack(dispatch, args)
    except (FormulaError, InvalidDecomposition, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except PlanningError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PLANNING


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
