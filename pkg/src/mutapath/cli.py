"""Command line entry point: reproduce, run, seed, diff."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .corpus import ManifestError, NoSites, load_manifest, run_corpus, seed_bug
from .minilang import ParseError, parse, pretty_print
from .mutops import operator_set
from .report import emit, summarize
from .search import SearchBudget, Status, find_mutation_path
from .treediff import SizeLimit, ast_diff

EXIT_CODES = {Status.FULL: 0, Status.PARTIAL: 3, Status.UNREPRODUCIBLE: 4}


def _read_ast(path: str):
    return parse(Path(path).read_text(encoding="utf-8"))


def _add_budget_args(p: argparse.ArgumentParser) -> None:
    defaults = SearchBudget()
    p.add_argument("--max-expansions", type=int, default=defaults.max_expansions)
    p.add_argument("--max-frontier", type=int, default=defaults.max_frontier)
    p.add_argument("--time-limit", type=float, default=defaults.time_limit, help="seconds per search")
    p.add_argument("--heuristic-scale", type=Fraction, default=defaults.heuristic_scale,
                   help="divide the distance estimate by this (e.g. 3 or 5/2)")
    p.add_argument("--stall-limit", type=int, default=defaults.stall_limit,
                   help="give up after this many expansions without getting closer")


def _budget(args: argparse.Namespace) -> SearchBudget:
    return SearchBudget(args.max_expansions, args.max_frontier, args.time_limit, args.heuristic_scale,
                        args.stall_limit)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mutapath", description="Reproduce bugs as chains of mutations.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    rep = sub.add_parser("reproduce", help="search a mutation path for one fixed/buggy pair")
    rep.add_argument("fixed")
    rep.add_argument("buggy")
    rep.add_argument("--ops", choices=["pitest", "extended"], default="extended")
    _add_budget_args(rep)

    run = sub.add_parser("run", help="run every pair of a manifest and write reports")
    run.add_argument("manifest")
    run.add_argument("--ops", default="pitest,extended",
                     help="comma-separated operator sets (default: pitest,extended)")
    run.add_argument("--parallelism", type=int, default=1)
    run.add_argument("--out", default="report")
    run.add_argument("--format", default="csv,json")
    run.add_argument("--timings", action="store_true", help="record wall-clock times (output no longer byte-stable)")
    _add_budget_args(run)

    seed = sub.add_parser("seed", help="inject a k-th order mutant into a program")
    seed.add_argument("fixed")
    seed.add_argument("--k", type=int, required=True)
    seed.add_argument("--seed", type=int, required=True)
    seed.add_argument("--ops", choices=["pitest", "extended"], default="extended")
    seed.add_argument("--out", required=True)

    diff = sub.add_parser("diff", help="tree edit distance between two programs")
    diff.add_argument("a")
    diff.add_argument("b")
    diff.add_argument("--script", action="store_true", help="also print the edit script")
    return parser


def _reproduce(args) -> int:
    result = find_mutation_path(_read_ast(args.fixed), _read_ast(args.buggy), operator_set(args.ops), _budget(args))
    print(json.dumps(result.to_dict(), indent=2))
    return EXIT_CODES[result.status]


def _run(args) -> int:
    opsets = [operator_set(name.strip()) for name in args.ops.split(",") if name.strip()]
    formats = {f.strip() for f in args.format.split(",") if f.strip()}
    manifest = load_manifest(args.manifest)
    results = run_corpus(manifest, opsets, _budget(args), args.parallelism)
    tables = summarize(results)
    emit(tables, results, args.out, formats, timings=args.timings)
    for ops in opsets:
        mine = [r for r in results if r.opset == ops.name]
        counts = {s: sum(r.status == s for r in mine) for s in "RPU"}
        excluded = sum(r.excluded for r in mine)
        print(f"{ops.name}: pairs={len(mine)} R={counts['R']} P={counts['P']} U={counts['U']} excluded={excluded}")
    return 0


def _seed(args) -> int:
    fixed = _read_ast(args.fixed)
    bug = seed_bug(fixed, args.k, args.seed, operator_set(args.ops))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "fixed.mini").write_text(pretty_print(bug.fixed), encoding="utf-8")
    (out / "buggy.mini").write_text(pretty_print(bug.buggy), encoding="utf-8")
    (out / "truth.json").write_text(json.dumps(bug.truth_dict(), indent=2) + "\n", encoding="utf-8")
    if bug.k < args.k:
        print(f"only {bug.k} non-cycling mutations were possible", file=sys.stderr)
    print(f"wrote {out / 'buggy.mini'} (k={bug.k})")
    return 0


def _diff(args) -> int:
    result = ast_diff(_read_ast(args.a), _read_ast(args.b), with_script=args.script)
    print(result.distance)
    if args.script:
        for op in result.script:
            print(json.dumps(op.to_dict()))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"reproduce": _reproduce, "run": _run, "seed": _seed, "diff": _diff}
    try:
        return handlers[args.command](args)
    except (OSError, ParseError, ManifestError, NoSites, SizeLimit, ValueError) as exc:
        print(f"mutapath: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
