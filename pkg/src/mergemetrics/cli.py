"""Command line interface.

Exit status is 0 on success, 1 on a domain error (reported as
``error: <Code>: <message>`` on stderr) and 2 on usage or parse errors.
Numbers in plain-text output use 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence, TextIO

from . import __version__
from .barcode import bottleneck, elder_rule
from .chambers import chamber_distance, chamber_signature, same_chamber
from .documents import (
    parse_document,
    parse_path,
    parse_tree,
    serialize_barcode,
    serialize_path,
    serialize_tree,
)
from .errors import DocumentSyntaxError, MergeTreeError
from .interleaving import best_labeled_upper_bound, interleaving_distance_exact
from .paths import METRICS, discrete_length, geodesic_witness, prune_path, verify_intrinsic_theorem
from .svg import render_svg
from .tree import random_tree, trivial_interleaving_bound


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _interval(iv) -> str:
    return f"[{fmt(iv.birth)}, {fmt(iv.death)})"


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _tree(path: str):
    return parse_tree(_read(path))


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _nonnegative(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError("must be a non-negative number")
    return value


def cmd_validate(args, out: TextIO) -> int:
    t = _tree(args.tree)
    if args.canonical:
        out.write(serialize_tree(t))
    else:
        out.write(f"valid {t.n_leaves} leaves {t.n_nodes} nodes\n")
    return 0


def cmd_barcode(args, out: TextIO) -> int:
    b = elder_rule(_tree(args.tree))
    if args.json:
        out.write(serialize_barcode(b))
    else:
        for iv in b:
            out.write(f"{fmt(iv.birth)} {fmt(iv.death)}\n")
    return 0


def cmd_bottleneck(args, out: TextIO) -> int:
    b1, b2 = elder_rule(_tree(args.a)), elder_rule(_tree(args.b))
    d, matching = bottleneck(b1, b2)
    out.write(f"{fmt(d)}\n")
    if matching is None:
        return 0
    left = {i for i, _ in matching.pairs}
    right = {j for _, j in matching.pairs}
    for i, j in matching.pairs:
        out.write(f"match {_interval(b1[i])} {_interval(b2[j])}\n")
    for i in range(len(b1)):
        if i not in left:
            out.write(f"unmatched-a {_interval(b1[i])}\n")
    for j in range(len(b2)):
        if j not in right:
            out.write(f"unmatched-b {_interval(b2[j])}\n")
    return 0


def cmd_interleave(args, out: TextIO) -> int:
    t1, t2 = _tree(args.a), _tree(args.b)
    if args.mode == "trivial":
        out.write(f"{fmt(trivial_interleaving_bound(t1, t2))}\n")
    elif args.mode == "upper":
        value, perm = best_labeled_upper_bound(t1, t2)
        out.write(f"{fmt(value)}\n")
        pairs = " ".join(f"{t1.leaves[i]}:{t2.leaves[j]}" for i, j in enumerate(perm))
        out.write(f"bijection {pairs}\n")
    else:
        value, w = interleaving_distance_exact(t1, t2)
        out.write(f"{fmt(value)}\n")
        for leaf, p in zip(t1.leaves, w.alpha_images):
            out.write(f"alpha {leaf} -> {p.base} @ {fmt(p.height)}\n")
        for leaf, p in zip(t2.leaves, w.beta_images):
            out.write(f"beta {leaf} -> {p.base} @ {fmt(p.height)}\n")
    return 0


def cmd_chamber(args, out: TextIO) -> int:
    if args.action == "signature":
        if len(args.trees) != 1:
            raise UsageError("chamber signature takes one tree")
        sig = chamber_signature(_tree(args.trees[0]))
        out.write(f"n {sig.n}\n")
        out.write("ranking " + " ".join(str(r) for r in sig.ranking) + "\n")
        return 0
    if len(args.trees) != 2:
        raise UsageError(f"chamber {args.action} takes two trees")
    t1, t2 = (_tree(p) for p in args.trees)
    if args.action == "compare":
        out.write("same\n" if same_chamber(t1, t2) else "different\n")
    else:
        out.write(f"{fmt(chamber_distance(t1, t2))}\n")
    return 0


def cmd_prune(args, out: TextIO) -> int:
    out.write(serialize_path(prune_path(parse_path(_read(args.path)), args.epsilon)))
    return 0


def cmd_path_length(args, out: TextIO) -> int:
    p = parse_path(_read(args.path))
    out.write(f"{fmt(discrete_length(p, args.metric))}\n")
    return 0


def cmd_geodesic(args, out: TextIO) -> int:
    out.write(serialize_path(geodesic_witness(_tree(args.a), _tree(args.b), args.samples)))
    return 0


def cmd_verify_theorem(args, out: TextIO) -> int:
    report = verify_intrinsic_theorem(
        args.trials, args.max_leaves, args.samples, args.seed, workers=args.workers
    )
    coarse, fine = report.refinement
    out.write(f"trials {report.trials}\n")
    out.write(f"max-leaves {report.max_leaves}\n")
    out.write(f"samples {report.samples}\n")
    out.write(f"seed {report.seed}\n")
    out.write(f"hard {report.hard_passed}/{report.trials}\n")
    out.write(f"soft {report.soft_passed}/{report.trials}\n")
    out.write(f"refinement S({coarse})<=S({fine}) {report.refinement_passed}/{report.trials}\n")
    nontrivial = sum(r.bottleneck < r.interleaving for r in report.records)
    out.write(f"pairs-with-dB-below-dI {nontrivial}\n")
    if args.json:
        Path(args.json).write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    if args.dump_dir:
        dump = Path(args.dump_dir)
        dump.mkdir(parents=True, exist_ok=True)
        for rec in report.failures():
            (dump / f"trial-{rec.index:05d}.json").write_text(json.dumps(
                {"seed": report.seed, "index": rec.index, "tree1": rec.tree1, "tree2": rec.tree2},
                indent=2,
            ) + "\n")
    ok = report.hard_passed == report.trials and report.soft_rate >= 0.99
    return 0 if ok else 1


def cmd_random(args, out: TextIO) -> int:
    t = random_tree(args.leaves, args.seed, (args.low, args.high))
    out.write(serialize_tree(t))
    return 0


def cmd_render(args, out: TextIO) -> int:
    obj = parse_document(_read(args.document))
    if not hasattr(obj, "intervals") and not hasattr(obj, "heights"):
        raise UsageError("render takes a tree or barcode document")
    out.write(render_svg(obj))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mergemetrics",
        description="Barcodes, bottleneck and interleaving distances of merge trees.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a tree document")
    p.add_argument("tree")
    p.add_argument("--canonical", action="store_true", help="print the canonical document")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("barcode", help="Elder Rule barcode of a tree")
    p.add_argument("tree")
    p.add_argument("--json", action="store_true", help="print a barcode document")
    p.set_defaults(func=cmd_barcode)

    p = sub.add_parser("bottleneck", help="bottleneck distance between two trees")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_bottleneck)

    p = sub.add_parser("interleave", help="interleaving distance or a bound on it")
    p.add_argument("--mode", choices=["exact", "upper", "trivial"], default="exact")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_interleave)

    p = sub.add_parser("chamber", help="chamber signatures and in-chamber distance")
    p.add_argument("action", choices=["signature", "compare", "distance"])
    p.add_argument("trees", nargs="+")
    p.set_defaults(func=cmd_chamber)

    p = sub.add_parser("prune", help="shift every waypoint of a path up by epsilon")
    p.add_argument("--epsilon", type=_nonnegative, required=True)
    p.add_argument("path")
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("path-length", help="discrete length of a path")
    p.add_argument("--metric", choices=sorted(METRICS), default="bottleneck")
    p.add_argument("path")
    p.set_defaults(func=cmd_path_length)

    p = sub.add_parser("geodesic", help="witness path between two trees")
    p.add_argument("--samples", type=_positive_int, default=128)
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("verify-theorem", help="random experiment comparing path length with d_I")
    p.add_argument("--trials", type=_positive_int, default=200)
    p.add_argument("--max-leaves", type=_positive_int, default=4)
    p.add_argument("--samples", type=_positive_int, default=128)
    p.add_argument("--seed", type=_seed, default=7)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--json", metavar="FILE", help="write the full report here")
    p.add_argument("--dump-dir", metavar="DIR", help="write failing trials here as fixtures")
    p.set_defaults(func=cmd_verify_theorem)

    p = sub.add_parser("random", help="random tree document")
    p.add_argument("--leaves", type=_positive_int, required=True)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--low", type=float, default=0.0)
    p.add_argument("--high", type=float, default=10.0)
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("render", help="SVG drawing of a tree or barcode document")
    p.add_argument("document")
    p.set_defaults(func=cmd_render)
    return parser


def run_cli(
    argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None
) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, DocumentSyntaxError) as exc:
        code = getattr(exc, "code", "UsageError")
        err.write(f"error: {code}: {exc}\n")
        return 2
    except MergeTreeError as exc:
        err.write(f"error: {exc.code}: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
