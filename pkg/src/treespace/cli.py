"""Command-line interface.

Reports are JSON on stdout (CSV opt-in for tables).  When trees are emitted,
the Newick lines go to stdout and the report moves to stderr so pipelines
compose.  Identical inputs and seed produce byte-identical reports.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__, metrics
from .errors import RangeError, TreeError
from .extremal import is_caterpillar, is_complete
from .generators import TreeFamily, generate
from .newick_io import parse_newick, serialize_newick
from .rearrange import OpKind, apply_op, enumerate_ops, neighbourhood
from .tree_core import PhyloTree
from .verify import SUITES, extremal_suite, formulas_suite

TABLE_N_CAP = 1 << 20


def _emit(report: dict, stream=None) -> None:
    print(json.dumps(report, sort_keys=True, indent=2), file=stream or sys.stdout)


def _report(command: str, inputs: dict, results, seed: int | None = None) -> dict:
    report = {
        "command": command,
        "inputs": inputs,
        "results": results,
        "version": __version__,
    }
    if seed is not None:
        report["seed"] = seed
    return report


def _read_trees(source: str) -> list[tuple[PhyloTree, tuple[str, ...]]]:
    text = sys.stdin.read() if source == "-" else open(source, encoding="utf-8").read()
    docs = []
    for line in text.splitlines():
        line = line.strip()
        if line:
            doc = parse_newick(line)
            docs.append((doc.tree, doc.warnings))
    if not docs:
        raise TreeError("no trees in input")
    return docs


def _tree_info(tree: PhyloTree, warnings: tuple[str, ...]) -> dict:
    n = tree.n
    return {
        "n": n,
        "gamma": metrics.gamma(tree),
        "nni_size": metrics.nni_size(n),
        "spr_size": metrics.spr_size(n),
        "tbr_size": metrics.tbr_size(tree),
        "spr_op_count": metrics.spr_op_count(n),
        "tbr_op_count": metrics.tbr_op_count(tree),
        "is_caterpillar": is_caterpillar(tree),
        "is_complete": is_complete(tree),
        "newick": serialize_newick(tree),
        "warnings": list(warnings),
    }


def cmd_info(args: argparse.Namespace) -> int:
    results = [_tree_info(tree, warnings) for tree, warnings in _read_trees(args.input)]
    _emit(_report("info", {"source": args.input}, results))
    return 0


def cmd_neighbourhood(args: argparse.Namespace) -> int:
    docs = _read_trees(args.input)
    if len(docs) != 1:
        raise TreeError("neighbourhood takes exactly one input tree")
    tree, _ = docs[0]
    kind = OpKind(args.op)
    inputs = {"source": args.input, "op": kind.value, "newick": serialize_newick(tree)}

    if args.emit_trees:
        from collections import Counter

        seen: dict = {}
        counts: Counter = Counter()
        ops = enumerate_ops(tree, kind)
        for op in ops:
            result = apply_op(tree, op)
            form = result.canonical_form()
            counts[form] += 1
            seen.setdefault(form, serialize_newick(result))
        results = {
            "n": tree.n,
            "op_count": len(ops),
            "neighbourhood_size": len(seen),
        }
        if args.multiplicities:
            hist = Counter(counts.values())
            results["multiplicity_histogram"] = {str(m): c for m, c in sorted(hist.items())}
        if args.emit_ops:
            results["ops"] = [op.to_json() for op in ops]
        for newick in sorted(seen.values()):
            print(newick)
        _emit(_report("neighbourhood", inputs, results), stream=sys.stderr)
        return 0

    forms, report = neighbourhood(tree, kind)
    results = report.to_json()
    if not args.multiplicities:
        results.pop("multiplicity_histogram")
    if args.emit_ops:
        results["ops"] = [op.to_json() for op in enumerate_ops(tree, kind)]
    _emit(_report("neighbourhood", inputs, results))
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    tree = generate(TreeFamily(args.family), args.n, seed=args.seed)
    print(serialize_newick(tree))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    suite = args.suite
    if suite == "formulas":
        result = formulas_suite(n_max=args.n_max or 7, samples=args.samples, seed=args.seed or 0)
    elif suite == "redundancy":
        result = SUITES[suite](n_max=args.n_max or 7)
    elif suite == "extremal":
        result = extremal_suite(n_max=args.n_max or 8, threads=args.threads)
    else:
        result = SUITES[suite]()
    inputs = {
        "suite": suite,
        "n_max": args.n_max,
        "samples": args.samples,
        "threads": args.threads,
    }
    _emit(_report("verify", inputs, result.to_json(), seed=args.seed))
    return 0 if result.passed else 1


def cmd_table(args: argparse.Namespace) -> int:
    n_max = args.n_max
    if not 4 <= n_max <= TABLE_N_CAP:
        raise RangeError(f"table supports 4 <= n-max <= {TABLE_N_CAP}, got {n_max}")
    what, family = args.what, args.family
    functions = {
        ("gamma", "caterpillar"): metrics.caterpillar_gamma,
        ("gamma", "complete"): metrics.gamma_complete,
        ("gamma", "perfect"): metrics.gamma_complete,
        ("tbr-size", "caterpillar"): metrics.caterpillar_tbr_size,
        ("tbr-size", "complete"): metrics.complete_tbr_size,
        ("tbr-size", "perfect"): metrics.perfect_tbr_size,
    }
    fn = functions[(what, family)]
    rows = []
    for n in range(4, n_max + 1):
        if family == "perfect":
            try:
                metrics.perfect_form(n)
            except TreeError:
                continue
        rows.append((n, fn(n)))
    if args.format == "csv":
        print("n,value")
        for n, value in rows:
            print(f"{n},{value}")
        return 0
    results = {"what": what, "family": family, "rows": [{"n": n, "value": v} for n, v in rows]}
    _emit(_report("table", {"what": what, "family": family, "n_max": n_max}, results))
    return 0


def _default_threads() -> int:
    env = os.environ.get("TREESPACE_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treespace", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="split statistic and neighbourhood sizes of input trees")
    p.add_argument("input", nargs="?", default="-", help="Newick file, one tree per line; '-' for stdin")
    p.set_defaults(fn=cmd_info)

    p = sub.add_parser("neighbourhood", help="enumerate one rearrangement neighbourhood")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--op", choices=[k.value for k in OpKind], default="tbr")
    p.add_argument("--emit-trees", action="store_true", help="print neighbour trees to stdout, report to stderr")
    p.add_argument("--multiplicities", action="store_true", help="include the output-multiplicity histogram")
    p.add_argument("--emit-ops", action="store_true", help="include JSON records of every operation")
    p.set_defaults(fn=cmd_neighbourhood)

    p = sub.add_parser("generate", help="emit a named tree family as Newick")
    p.add_argument("--family", choices=[f.value for f in TreeFamily], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--n-max", type=int, default=None, dest="n_max")
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("table", help="closed-form tables per family")
    p.add_argument("--what", choices=["gamma", "tbr-size"], required=True)
    p.add_argument("--family", choices=["caterpillar", "complete", "perfect"], required=True)
    p.add_argument("--n-max", type=int, required=True, dest="n_max")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(fn=cmd_table)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (TreeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
