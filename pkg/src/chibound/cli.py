"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .decomp import diversity, find_tagging_violation, labelling_from_tagging
from .engine import BASES, color
from .errors import ChiboundError, InvariantError, MalformedInputError
from .experiment import family_tasks, parse_range, rows_to_csv, run_experiment, sweep_tasks
from .factor import build_plan, dump_plan
from .graph import find_conflict
from .io import (coloring_from_json, coloring_to_json, decomposition_from_json, decomposition_to_json,
                 dump_json, graph_from_json, graph_to_json, load_json, split_to_json)
from .kexpr import evaluate, expr_to_decomposition, parse, random_kexpr, render
from .pipeline import SPLITS, choose_split

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class UsageError(MalformedInputError):
    pass


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        print(text)
    else:
        Path(path).write_text(text + "\n")


def _read_exprs(args) -> list[str]:
    if args.expr is not None:
        return [args.expr]
    if args.source is None:
        raise UsageError("give an expression file, --expr TEXT or --random SEED")
    try:
        lines = Path(args.source).read_text().splitlines()
    except OSError as exc:
        raise MalformedInputError(f"{args.source}: {exc.strerror}") from exc
    exprs = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not exprs:
        raise MalformedInputError(f"{args.source}: no expression found")
    return exprs


def _seed(args) -> int | None:
    if args.random is None:
        return None
    seed = args.seed if args.random is True else args.random
    if seed is None:
        raise UsageError("randomized commands need a seed: --random SEED or --seed SEED")
    return seed


def _expression(args):
    seed = _seed(args)
    if seed is not None:
        if args.leaves is None:
            raise UsageError("--random needs --leaves")
        return random_kexpr(seed, args.k, args.leaves)
    exprs = _read_exprs(args)
    if len(exprs) > 1:
        raise UsageError(f"{len(exprs)} expressions given; this command takes one")
    return parse(exprs[0], args.k)


def cmd_build(args) -> int:
    seed = _seed(args)
    if seed is not None:
        if args.leaves is None:
            raise UsageError("--random needs --leaves")
        exprs = [random_kexpr(seed, args.k, args.leaves)]
    else:
        exprs = [parse(t, args.k) for t in _read_exprs(args)]
    out = []
    for e in exprs:
        lg = evaluate(e)
        obj = graph_to_json(lg.graph)
        if args.labelled:
            obj["labels"] = list(lg.labels)
            obj["expr"] = render(e)
        out.append(obj)
    _emit(dump_json(out[0] if len(out) == 1 else out), args.out)
    if args.decomposition:
        D, tags, _ = expr_to_decomposition(exprs[0])
        dump_json(decomposition_to_json(D, tags), args.decomposition)
    return EXIT_OK


def cmd_color(args) -> int:
    if args.graph or args.decomposition:
        if not (args.graph and args.decomposition):
            raise UsageError("--graph and --decomposition go together")
        G = graph_from_json(load_json(args.graph))
        D, tags = decomposition_from_json(load_json(args.decomposition))
        if tags is None:
            raise UsageError("decomposition JSON needs a tags field")
    else:
        D, tags, G = expr_to_decomposition(_expression(args))
    bad = find_tagging_violation(D, G, tags, args.k)
    if bad is not None:
        raise MalformedInputError(f"tagging invalid: {bad}")
    weights = None
    if args.weights:
        weights = load_json(args.weights)
        if not isinstance(weights, list):
            raise MalformedInputError("weights JSON must be a list")
    lt = labelling_from_tagging(D, G, tags, args.k)
    levels, kind = choose_split(lt, args.k, args.split)
    plan = build_plan(lt, levels)
    coloring, audit = color(G, D, tags, plan, BASES[args.base], weights, labels=lt, k=args.k)
    _emit(dump_json(coloring_to_json(coloring)), args.out)
    if args.audit:
        _emit(audit.to_json() if args.audit.endswith(".json") else audit.to_text(),
              None if args.audit == "-" else args.audit)
    if args.dump_plan:
        _emit(dump_plan(plan, lt), args.dump_plan)
    if args.split_out:
        dump_json(split_to_json(levels), args.split_out)
    print(f"verified proper colouring: count={coloring.count} split={kind} "
          f"height={max(levels.values())} plan_depth={plan.depth}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    G = graph_from_json(load_json(args.graph))
    if args.coloring is None and args.decomposition is None:
        raise UsageError("give --coloring or --decomposition")
    ok = True
    if args.coloring is not None:
        c = coloring_from_json(load_json(args.coloring))
        w = load_json(args.weights) if args.weights else None
        bad = find_conflict(G, c, w)
        if bad is None:
            print(f"coloring: pass (count={c.count})")
        else:
            ok = False
            what, verts = bad
            print(f"coloring: fail ({what} witness {list(verts)})")
    if args.decomposition is not None:
        D, tags = decomposition_from_json(load_json(args.decomposition))
        if len(D.eta) != G.n:
            raise MalformedInputError(f"decomposition maps {len(D.eta)} vertices, graph has {G.n}")
        div, _ = diversity(D, G)
        print(f"diversity: {div}")
        if tags is None:
            print("tagging: absent")
        else:
            bad = find_tagging_violation(D, G, tags, args.k)
            if bad is None:
                print("tagging: pass")
            else:
                ok = False
                print(f"tagging: fail (property {bad.prop} at node {bad.node}, vertices {list(bad.pair)})")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_experiment(args) -> int:
    if args.family:
        if args.family != "subpower":
            raise UsageError(f"unknown family {args.family!r}")
        tasks = family_tasks(args.base_graph, parse_range(args.i), args.split, args.base)
    else:
        if args.seeds is None:
            raise UsageError("random sweeps need --seeds")
        tasks = sweep_tasks(parse_range(args.seeds), parse_range(args.k), parse_range(args.leaves),
                            args.split, args.base)
    rows = run_experiment(tasks, args.workers, args.timeout)
    _emit(rows_to_csv(rows).rstrip("\n"), args.out)
    if args.figures:
        from .report import write_figures
        for path in write_figures(rows, args.figures):
            print(f"wrote {path}", file=sys.stderr)
    bad = [r for r in rows if r.status != "ok" or (r.omega is not None and r.colors is not None
                                                   and r.colors < r.omega)]
    return EXIT_FAIL if bad else EXIT_OK


def _add_source(p: argparse.ArgumentParser, random_ok: bool = True) -> None:
    p.add_argument("source", nargs="?", help="file with one expression per line")
    p.add_argument("--expr", help="expression text")
    p.add_argument("--k", type=int, required=True, help="label budget")
    if random_ok:
        p.add_argument("--random", nargs="?", type=int, const=True, metavar="SEED",
                       help="random expression from SEED (or from --seed)")
        p.add_argument("--seed", type=int)
        p.add_argument("--leaves", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chibound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="evaluate an expression to graph JSON")
    _add_source(p)
    p.add_argument("--labelled", action="store_true", help="include final labels and the expression")
    p.add_argument("--decomposition", help="also write the decomposition JSON with tags here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("color", help="colour via the decomposition engine")
    _add_source(p)
    p.add_argument("--graph")
    p.add_argument("--decomposition")
    p.add_argument("--weights", help="JSON list of vertex weights")
    p.add_argument("--split", choices=SPLITS, default="depth")
    p.add_argument("--base", choices=sorted(BASES), default="bipartite")
    p.add_argument("--audit", help="audit log path (.json for JSON, - for stdout)")
    p.add_argument("--dump-plan", help="write the plan dump here")
    p.add_argument("--split-out", help="write the split JSON here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("verify", help="check a colouring or a decomposition's tagging")
    p.add_argument("--graph", required=True)
    p.add_argument("--coloring")
    p.add_argument("--weights")
    p.add_argument("--decomposition")
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="seeded sweep to CSV, optionally with figures")
    p.add_argument("--seeds", help="seed range such as 0..99")
    p.add_argument("--k", default="2,3")
    p.add_argument("--leaves", default="20")
    p.add_argument("--family", help="deterministic family instead of random expressions (subpower)")
    p.add_argument("--base-graph", default="C5")
    p.add_argument("--i", default="1..3", help="powers for the family mode")
    p.add_argument("--split", choices=SPLITS, default="depth")
    p.add_argument("--base", choices=sorted(BASES), default="bipartite")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timeout", type=float, help="per-instance seconds")
    p.add_argument("--out", help="CSV path (stdout by default)")
    p.add_argument("--figures", help="directory for PNG figures")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InvariantError as exc:
        print(f"error: internal check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ChiboundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
