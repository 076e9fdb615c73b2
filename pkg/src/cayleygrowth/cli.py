"""``cayleygrowth`` command line: growth, sweep, search, pattern and pathfind.

Exit codes: 0 success, 1 no result (pathfind failure), 2 invalid arguments,
3 memory budget exceeded, 4 unknown or pending family.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from pathlib import Path

from . import __version__
from .analysis import describe, quasipoly_fit
from .bfs import (DEFAULT_MEMORY_BUDGET, BitsetAllocator, EngineError, MemoryBudgetExceeded,
                  adjacency_matrix, choose_engine, growth)
from .catalog import DefinitionPendingError, UnknownFamilyError, catalog
from .graph import GraphDef, graph_from_dict, make_graph
from .io import (RunManifest, peak_rss_bytes, write_growth_csv, write_json, write_jsonl,
                 write_matrix_market, write_table_csv)
from .matgroup import RootChoice, abelian_graph, heisenberg_graph, unitriangular_graph
from .pathfind import beam_search, verify_path
from .search import dot_export, koltsov3, max_diameter_search, pattern_tag, sheveleva2, whiskers_classify

EXIT_OK, EXIT_NOT_FOUND, EXIT_USAGE, EXIT_BUDGET, EXIT_FAMILY = 0, 1, 2, 3, 4

CONSTRUCTIONS = {"koltsov3": koltsov3, "sheveleva2": sheveleva2}
MATRIX_FAMILIES = ("unitriangular", "heisenberg", "abelian")


class UsageError(ValueError):
    pass


# ------------------------------------------------------------- argument helpers


_UNITS = {"": 1, "b": 1, "k": 2**10, "kb": 10**3, "kib": 2**10, "m": 2**20, "mb": 10**6,
          "mib": 2**20, "g": 2**30, "gb": 10**9, "gib": 2**30, "t": 2**40, "tb": 10**12, "tib": 2**40}


def parse_bytes(text: str) -> int:
    """``8GiB``, ``512M``, ``1e9`` or a plain byte count."""
    m = re.fullmatch(r"\s*([0-9.eE+]+)\s*([a-zA-Z]*)\s*", text)
    if not m or m.group(2).lower() not in _UNITS:
        raise argparse.ArgumentTypeError(f"invalid memory size {text!r}")
    return int(float(m.group(1)) * _UNITS[m.group(2).lower()])


def parse_state(text: str) -> tuple[int, ...]:
    text = text.strip().strip("[]()")
    try:
        return tuple(int(x) for x in re.split(r"[,\s]+", text) if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid state {text!r}") from None


def parse_param(text: str) -> tuple[str, object]:
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"parameter must look like key=value, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def parse_range(text: str) -> list[int]:
    m = re.fullmatch(r"(\d+)(?:(?:\.\.|-|:)(\d+))?", text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"range must look like 4..12, got {text!r}")
    lo = int(m.group(1))
    hi = int(m.group(2) or lo)
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def _graph_args(p: argparse.ArgumentParser, need_n: bool = True) -> None:
    src = p.add_argument_group("graph definition")
    src.add_argument("--family", help="catalog family, construction or matrix family")
    src.add_argument("--def-json", type=Path, help="graph definition JSON file")
    if need_n:
        src.add_argument("--n", type=int, help="degree (d for heisenberg)")
    src.add_argument("--m", type=int, help="modulus for matrix families")
    src.add_argument("--param", type=parse_param, action="append", default=[],
                     metavar="KEY=VALUE", help="extra family parameter, repeatable")
    src.add_argument("--coset", help="'binary' or an explicit central state such as 0,0,1,1")
    src.add_argument("--inverse-closure", action="store_true",
                     help="add missing inverses (undirected graph)")


def _common_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--memory-budget", type=parse_bytes, default=DEFAULT_MEMORY_BUDGET)


def build_graph(args, n: int | None = None) -> GraphDef:
    """Resolve the graph-definition arguments into a :class:`GraphDef`."""
    from .graph import inverse_closure

    if args.def_json is not None:
        if args.family:
            raise UsageError("give either --family or --def-json, not both")
        return graph_from_dict(json.loads(args.def_json.read_text()))
    if not args.family:
        raise UsageError("one of --family or --def-json is required")
    n = getattr(args, "n", None) if n is None else n
    if n is None:
        raise UsageError("--n is required with --family")
    params = dict(args.param)
    if args.family in MATRIX_FAMILIES:
        if args.m is None:
            raise UsageError(f"--m is required for {args.family}")
        if args.family == "unitriangular":
            choice = RootChoice(params.pop("roots", "fundamental"), bool(params.pop("oriented", False)))
            graph = unitriangular_graph(n, args.m, choice)
        elif args.family == "heisenberg":
            graph = heisenberg_graph(n, args.m)
        else:
            graph = abelian_graph(n, args.m)
        if params:
            raise UsageError(f"unused parameters for {args.family}: {sorted(params)}")
        return graph
    if args.family in CONSTRUCTIONS:
        gs = CONSTRUCTIONS[args.family](n, **params)
    else:
        gs = catalog(args.family, n, **params)
    if args.inverse_closure:
        gs = inverse_closure(gs)
    coset = args.coset
    if coset is not None and coset != "binary":
        coset = parse_state(coset)
    return make_graph(gs, coset)


# ------------------------------------------------------------- commands


def _growth_run(graph: GraphDef, args, allocator: BitsetAllocator):
    engine = args.engine if args.engine != "auto" else choose_engine(graph, args.memory_budget)
    kwargs = dict(max_depth=args.max_depth, memory_budget=args.memory_budget,
                  n_antipodes=args.antipodes)
    if engine == "bitmask":
        kwargs.update(n_jobs=max(1, args.threads), allocator=allocator)
    return engine, growth(graph, engine, **kwargs)


def _summary(graph: GraphDef, result) -> dict:
    data = {"graph": graph.name, "directed": graph.directed, "space": graph.space.to_dict(),
            **result.to_dict()}
    data["stats"] = None if result.truncated else describe(result).to_dict()
    return data


def cmd_growth(args, manifest: RunManifest) -> int:
    graph = build_graph(args)
    allocator = BitsetAllocator()
    engine, result = _growth_run(graph, args, allocator)
    manifest.engine = engine
    manifest.notes["bitset_peak_bytes"] = allocator.peak
    manifest.record(write_growth_csv(args.out / "growth.csv", result.layer_sizes))
    manifest.record(write_json(args.out / "summary.json", _summary(graph, result)))
    if args.adjacency:
        mat, _ = adjacency_matrix(graph, args.node_cap)
        manifest.record(write_matrix_market(args.out / "adjacency.mtx", mat, graph.name))
    tag = " (truncated)" if result.truncated else ""
    print(f"{graph.name}: diameter {result.diameter}{tag}, reachable {result.reachable}, "
          f"antipodes {result.antipode_count}, engine {engine}")
    return EXIT_OK


def cmd_sweep(args, manifest: RunManifest) -> int:
    deg_max, s_max = args.fit
    points, rows, errors = [], [], {}
    engines = set()
    for n in args.n_range:
        try:
            graph = build_graph(args, n)
            engine, result = _growth_run(graph, args, BitsetAllocator())
        except (ValueError, MemoryBudgetExceeded, EngineError) as exc:
            errors[str(n)] = f"{type(exc).__name__}: {exc}"
            print(f"n={n}: {errors[str(n)]}", file=sys.stderr)
            continue
        engines.add(engine)
        rows.append((n, result.diameter, result.reachable, int(result.truncated)))
        if not result.truncated:
            points.append((n, result.diameter))
        print(f"n={n}: diameter {result.diameter}")
    manifest.engine = ",".join(sorted(engines)) or None
    qp = quasipoly_fit(points, s_max=s_max, deg_max=deg_max, min_verify=args.min_verify,
                       residues=args.residues)
    fit = {"family": args.family, "points": points, "errors": errors,
           "fit": None if qp is None else qp.to_dict(),
           "constituents": None if qp is None else
           {str(r): qp.describe_constituent(r) for r in range(qp.s)}}
    manifest.record(write_table_csv(args.out / "sweep.csv", ["n", "diameter", "reachable", "truncated"], rows))
    manifest.record(write_json(args.out / "fit.json", fit))
    if qp is None:
        print("no quasi-polynomial fits the sweep")
    else:
        print(f"fit: s={qp.s}, degree {qp.degree}, verified points {qp.verified_points}")
        for r in range(qp.s):
            print(f"  n = {r} mod {qp.s}: {qp.describe_constituent(r)}")
    return EXIT_OK


def cmd_search(args, manifest: RunManifest) -> int:
    outcome = max_diameter_search(args.n, directed=args.directed, mode=args.mode, budget=args.budget,
                                  seed=args.seed, n_jobs=max(1, args.threads), keep=args.keep)
    manifest.engine = "table"
    manifest.record(write_jsonl(args.out / "records.jsonl", (r.to_dict() for r in outcome.records)))
    summary = {"n": args.n, "directed": args.directed, "mode": args.mode,
               "max_diameter": outcome.max_diameter, "maxima": len(outcome.maxima()),
               "complete": outcome.complete, "evaluated": outcome.evaluated}
    manifest.record(write_json(args.out / "summary.json", summary))
    flag = "" if outcome.complete else " (budget exhausted, partial)"
    print(f"n={args.n} {'directed' if args.directed else 'undirected'}: "
          f"max diameter {outcome.max_diameter} over {outcome.evaluated} candidates{flag}")
    return EXIT_OK


def cmd_pattern(args, manifest: RunManifest) -> int:
    graph = build_graph(args)
    gs = graph.generator_set
    if gs is None:
        raise UsageError("support graphs need permutation generators")
    report = whiskers_classify(gs)
    dot_path = args.dot_out or args.out / "support.dot"
    dot_path.write_text(dot_export(gs, gs.name))
    manifest.record(dot_path)
    summary = {"generators": gs.to_dict(), "pattern": pattern_tag(gs), **report.to_dict()}
    manifest.record(write_json(args.out / "summary.json", summary))
    print(f"{gs.name}: pattern {summary['pattern']}, "
          f"is_square_with_whiskers: {str(report.is_square_with_whiskers).lower()}")
    return EXIT_OK


def cmd_pathfind(args, manifest: RunManifest) -> int:
    graph = build_graph(args)
    start = graph.start if args.start is None else args.start
    manifest.engine = f"beam:{args.scorer}"
    path = beam_search(graph, start, args.target, beam_width=args.beam_width,
                       max_steps=args.max_steps, scorer=args.scorer)
    if path is None:
        manifest.notes["found"] = False
        print(f"no path within {args.max_steps} steps at beam width {args.beam_width}")
        return EXIT_NOT_FOUND
    record = path.to_dict(graph)
    manifest.notes["found"] = True
    manifest.notes["length"] = path.length
    if args.expected_length is not None:
        manifest.notes["expected_length"] = args.expected_length
        manifest.notes["length_gate"] = "met" if path.length == args.expected_length else "relaxed"
    manifest.record(write_json(args.out / "path.json", record))
    print(f"path of length {path.length}, verified: {str(verify_path(graph, path)).lower()}")
    return EXIT_OK


# ------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cayleygrowth", description="Exact growth of Cayley and Schreier graphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("growth", help="layer sizes, diameter and antipodes of one graph")
    _graph_args(p)
    _common_args(p)
    p.add_argument("--engine", choices=("auto", "hash", "bitmask"), default="auto")
    p.add_argument("--max-depth", type=int)
    p.add_argument("--antipodes", type=int, default=16, help="antipode sample size")
    p.add_argument("--adjacency", action="store_true", help="also write adjacency.mtx")
    p.add_argument("--node-cap", type=int, default=20_000)
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("sweep", help="diameters over a range of n plus a quasi-polynomial fit")
    _graph_args(p, need_n=False)
    _common_args(p)
    p.add_argument("--n-range", type=parse_range, required=True, metavar="LO..HI")
    p.add_argument("--fit", type=int, nargs=2, default=(2, 6), metavar=("DEG_MAX", "S_MAX"))
    p.add_argument("--min-verify", type=int, default=1)
    p.add_argument("--residues", type=int, nargs="+", help="residues of n the fit must cover")
    p.add_argument("--engine", choices=("auto", "hash", "bitmask"), default="auto")
    p.add_argument("--max-depth", type=int)
    p.add_argument("--antipodes", type=int, default=0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("search", help="maximum-diameter generator search in S_n")
    _common_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--directed", action="store_true")
    p.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--keep", type=int, default=50)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("pattern", help="support graph, pattern classification and DOT export")
    _graph_args(p)
    _common_args(p)
    p.add_argument("--dot-out", type=Path)
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("pathfind", help="beam search for a move sequence reaching a target")
    _graph_args(p)
    _common_args(p)
    p.add_argument("--target", type=parse_state, required=True)
    p.add_argument("--start", type=parse_state)
    p.add_argument("--beam-width", type=int, default=1024)
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--scorer", choices=("hamming", "exact"), default="hamming")
    p.add_argument("--expected-length", type=int,
                   help="record in the manifest whether the path meets this length")
    p.set_defaults(func=cmd_pathfind)
    return parser


def _jsonable_args(args) -> dict:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key == "func":
            continue
        if isinstance(value, Path):
            value = str(value)
        elif isinstance(value, tuple):
            value = list(value)
        elif isinstance(value, list):
            value = [list(v) if isinstance(v, tuple) else v for v in value]
        out[key] = value
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be >= 1")
    args.out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(args.command, _jsonable_args(args))
    began = time.perf_counter()
    try:
        code = args.func(args, manifest)
    except (UnknownFamilyError, DefinitionPendingError) as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_FAMILY
    except MemoryBudgetExceeded as exc:
        print(f"error: {exc} (reached depth {exc.depth})", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    manifest.wall_time = time.perf_counter() - began
    manifest.peak_memory = peak_rss_bytes()
    manifest.write(args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
