"""Batch command line front end.

Six subcommands: bf compares two structures, learn runs sessions, check
decides the family separation conditions, swap runs the adversarial
family-edit experiment, algebra normalizes an order expression, and kb
linearizes or interleaves finite trees.  Everything prints JSON except
algebra, which prints the normal form in grammar syntax.

Exit codes: 0 success, 1 usage or format error, 2 unsupported input,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor

from .bfgame import leq2_order, leq_n_snapshots, leq_n_unary, pointed
from .core import OrderType, Snapshot, UnaryTail, permuted_presentation
from .errors import (
    BflearnError,
    BoundExceededError,
    ExprSyntaxError,
    InfiniteInputError,
    LengthMismatchError,
    PreconditionError,
    UnsupportedError,
    UsageError,
    VariantMismatchError,
    VocabularyMismatchError,
)
from .formats import (
    dump,
    family_from_json,
    load_json,
    load_structure,
    report_to_json,
    sentences_from_json,
    session_to_json,
    snapshot_to_json,
    tree_from_json,
    tree_to_json,
    verdict_to_json,
)
from .learn import (
    counter_learner,
    equiv2_translate,
    freeze_translate,
    min_iso_translate,
    qss_learner,
)
from .orderalg import format_expr, normalize, parse_expr
from .sessions import (
    condition3_report,
    condition3a_check,
    evaluate_success,
    run_session,
    swap_experiment,
)
from .trees import interleave_trees, kb_linearize

TRANSLATIONS = {
    "identity": lambda fam, L: L,
    "min_iso": min_iso_translate,
    "equiv2": equiv2_translate,
    "freeze": freeze_translate,
}


def cmd_bf(args):
    left = load_structure(args.left)
    right = load_structure(args.right)
    if isinstance(left, Snapshot) and isinstance(right, Snapshot):
        mode, cap = "snapshots", None
        result = leq_n_snapshots(pointed(left), pointed(right), args.n)
    elif isinstance(left, UnaryTail) and isinstance(right, UnaryTail):
        mode, cap = "unary", args.cap if args.cap is not None else 4
        result = leq_n_unary(left, right, args.n, cap)
    elif isinstance(left, OrderType) and isinstance(right, OrderType):
        mode = "order"
        if args.n <= 1:
            cap = None
            result = True
        elif args.n == 2:
            cap = args.cap if args.cap is not None else 6
            result = leq2_order(left.expr, right.expr, cap)
        else:
            raise UnsupportedError(
                "order descriptors support depths 0 to 2 only"
            )
    else:
        raise UsageError("left and right must describe the same kind of structure")
    print(dump({
        "relation": "leq_n",
        "left": args.left,
        "right": args.right,
        "n": args.n,
        "result": result,
        "cap": cap,
        "mode": mode,
    }))
    return 0


def _build_learner(args, named):
    if args.learner == "qss":
        return qss_learner(list(named.values()))
    for flag in ("psi", "theta"):
        name = getattr(args, flag)
        if name is None:
            raise UsageError("the counter learner needs --psi and --theta")
        if name not in named:
            raise UsageError(f"sentence {name!r} is not in the sentence file")
    return counter_learner(named[args.psi], named[args.theta])


def cmd_learn(args):
    fam = family_from_json(load_json(args.family))
    named = sentences_from_json(load_json(args.sentences))
    if not 0 <= args.present < len(fam.base):
        raise UsageError("--present must be a base index")
    truth_index = args.present if args.truth is None else args.truth
    if not 0 <= truth_index < len(fam.base):
        raise UsageError("--truth must be a base index")
    target = fam.base[args.present]

    def one(seed):
        learner = _build_learner(args, named)
        if args.translate is not None:
            learner = TRANSLATIONS[args.translate](fam, learner)
        return run_session(fam, permuted_presentation(target, seed), learner,
                           args.horizon)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(one, args.seeds))
    else:
        results = [one(seed) for seed in args.seeds]
    out = {"sessions": [session_to_json(r) for r in results]}
    if args.mode is not None:
        truth = fam.base[truth_index]
        out["mode"] = args.mode
        out["window"] = args.window
        out["successes"] = [
            evaluate_success(r, fam, truth, args.mode, args.window)
            for r in results
        ]
    print(dump(out))
    return 0


def cmd_check(args):
    fam = family_from_json(load_json(args.family))
    report = condition3_report(fam, args.tuple_bound, args.cap)
    out = {"condition3": report is not None}
    try:
        out["condition3a"] = condition3a_check(fam, args.tuple_bound, args.cap)
    except PreconditionError as exc:
        out["condition3a"] = None
        out["note"] = str(exc)
    out["witnesses"] = report_to_json(report)
    print(dump(out))
    return 0


def cmd_swap(args):
    a1 = load_structure(args.a1)
    a2 = load_structure(args.a2)
    if isinstance(a1, Snapshot) or isinstance(a2, Snapshot):
        raise UsageError("swap takes structure descriptors, not snapshots")
    sentences = None
    if args.sentences is not None:
        named = sentences_from_json(load_json(args.sentences))
        if args.psi is None or args.theta is None:
            raise UsageError("--sentences needs --psi and --theta names")
        for name in (args.psi, args.theta):
            if name not in named:
                raise UsageError(f"sentence {name!r} is not in the sentence file")
        sentences = (named[args.psi], named[args.theta])
    verdict = swap_experiment(
        TRANSLATIONS[args.translate], a1, a2, args.horizon, args.seeds,
        sentences=sentences, tuple_bound=args.tuple_bound, cap=args.cap,
    )
    print(dump(verdict_to_json(verdict)))
    return 0


def cmd_algebra(args):
    print(format_expr(normalize(parse_expr(args.expr))))
    return 0


def cmd_kb(args):
    tree = tree_from_json(load_json(args.tree))
    if args.interleave is not None:
        other = tree_from_json(load_json(args.interleave))
        print(dump(tree_to_json(interleave_trees(tree, other))))
    else:
        print(dump(snapshot_to_json(kb_linearize(tree, max_nodes=args.max_nodes))))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bflearn",
        description="Back-and-forth comparisons, limit learners, and order algebra.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bf = sub.add_parser("bf", help="compare two structures at a depth")
    bf.add_argument("--left", required=True, help="snapshot/descriptor file")
    bf.add_argument("--right", required=True, help="snapshot/descriptor file")
    bf.add_argument("--n", type=int, required=True, help="comparison depth")
    bf.add_argument("--cap", type=int, help="cardinality cap (descriptors only)")
    bf.set_defaults(func=cmd_bf)

    learn = sub.add_parser("learn", help="run learning sessions")
    learn.add_argument("--family", required=True, help="family JSON file")
    learn.add_argument("--sentences", required=True, help="named sentence JSON file")
    learn.add_argument("--learner", choices=("qss", "counter"), required=True)
    learn.add_argument("--psi", help="counter: name of the even-side sentence")
    learn.add_argument("--theta", help="counter: name of the odd-side sentence")
    learn.add_argument("--present", type=int, required=True,
                       help="base index of the presented structure")
    learn.add_argument("--seeds", type=int, nargs="+", required=True)
    learn.add_argument("--horizon", type=int, required=True)
    learn.add_argument("--translate", choices=sorted(TRANSLATIONS))
    learn.add_argument("--mode", choices=("Ex", "Bc"),
                       help="also evaluate success in this mode")
    learn.add_argument("--window", type=int, default=0)
    learn.add_argument("--truth", type=int,
                       help="base index of the truth (default: --present)")
    learn.add_argument("--jobs", type=int, default=1,
                       help="run independent sessions in this many threads")
    learn.set_defaults(func=cmd_learn)

    check = sub.add_parser("check", help="decide the family separation conditions")
    check.add_argument("--family", required=True)
    check.add_argument("--tuple-bound", type=int, required=True)
    check.add_argument("--cap", type=int, required=True)
    check.set_defaults(func=cmd_check)

    swap = sub.add_parser("swap", help="run the adversarial family-edit experiment")
    swap.add_argument("--a1", required=True, help="descriptor file")
    swap.add_argument("--a2", required=True, help="descriptor file")
    swap.add_argument("--translate", choices=sorted(TRANSLATIONS), required=True)
    swap.add_argument("--horizon", type=int, required=True)
    swap.add_argument("--seeds", type=int, nargs="+", required=True)
    swap.add_argument("--sentences", help="named sentence JSON file")
    swap.add_argument("--psi", help="name of the first-side sentence")
    swap.add_argument("--theta", help="name of the second-side sentence")
    swap.add_argument("--tuple-bound", type=int, default=3)
    swap.add_argument("--cap", type=int, default=4)
    swap.set_defaults(func=cmd_swap)

    algebra = sub.add_parser("algebra", help="normalize an order expression")
    algebra.add_argument("expr", help="expression in the shared grammar")
    algebra.set_defaults(func=cmd_algebra)

    kb = sub.add_parser("kb", help="linearize or interleave trees")
    kb.add_argument("tree", help="tree JSON file")
    kb.add_argument("--interleave", help="second tree file: emit the interleaving")
    kb.add_argument("--max-nodes", type=int, default=512)
    kb.set_defaults(func=cmd_kb)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (
        UsageError,
        ExprSyntaxError,
        PreconditionError,
        VocabularyMismatchError,
        VariantMismatchError,
        LengthMismatchError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (UnsupportedError, BoundExceededError, InfiniteInputError) as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return 2
    except BflearnError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
