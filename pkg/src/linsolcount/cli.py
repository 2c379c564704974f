"""Command-line driver: ``linsolcount {analyze,census,simulate,compound,sweep}``.

Exit codes: 0 ok, 1 usage, 2 unreadable input, 3 failed precondition or
bad embedding, 4 enumeration box too large, 5 normality thresholds missed,
6 degenerate (constant) counts.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, census, compounded
from . import exact_linalg as el
from . import random_model as rm
from .errors import (
    BadEmbedding,
    BadPartition,
    BoxTooLarge,
    DegenerateVariance,
    IndexOutOfRange,
    LinsolError,
    NotAbundant,
    ParseError,
    PreconditionError,
    TooLarge,
)
from .partitions import PartitionFamily
from .sysfile import format_matrix, load_partitions, load_system, system_to_dict
from .system_properties import (
    SystemSpec,
    admissible_family,
    partition_family,
    positive_partition_family,
    property_report,
)

(EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_PRECONDITION,
 EXIT_BOX, EXIT_NORMALITY, EXIT_DEGENERATE) = range(7)

FAMILIES = ("discrete", "nontrivial", "positive", "admissible")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _fraction_list(text: str) -> list[Fraction]:
    return [_fraction(t) for t in text.split(",") if t.strip()]


def _probability(text: str) -> float:
    p = float(_fraction(text))
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError(f"p={text} outside [0, 1]")
    return p


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def _family(spec: SystemSpec, args, n: int) -> PartitionFamily:
    if getattr(args, "partitions", None):
        return load_partitions(args.partitions, spec.m)
    name = args.family
    if name == "discrete":
        return PartitionFamily.discrete(spec.m)
    if name == "nontrivial":
        return partition_family(spec.A)
    if name == "positive":
        return positive_partition_family(spec.A)
    return admissible_family(spec.A, spec.b, n)


def _header(command: str, spec: SystemSpec, config: dict) -> dict:
    return {
        "tool": {"name": "linsolcount", "version": __version__},
        "command": command,
        "config": config,
        "system": system_to_dict(spec),
    }


def _emit(doc: dict, out: Optional[str]) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    spec = load_system(args.system)
    rep = property_report(spec.A)
    if args.density and not rep.positive:
        raise PreconditionError("density is only defined here for positive matrices")
    props = rep.to_dict()
    if not rep.positive:
        props.pop("density")
    doc = _header("analyze", spec, {"system": str(args.system), "density": args.density})
    doc["properties"] = props
    _emit(doc, args.out)
    return EXIT_OK


def cmd_census(args) -> int:
    spec = load_system(args.system)
    sols = census.enumerate_solutions(spec, args.n)
    counts = {
        "total": len(sols),
        "proper": census.count_proper(sols),
        "nontrivial": census.count_typed(sols, partition_family(spec.A)),
        "per_partition": {str(q): c for q, c in sols.shape_counts().items()},
    }
    family = None
    if args.partitions or args.kind == "typed":
        family = _family(spec, args, args.n)
        counts["typed"] = census.count_typed(sols, family)
    if args.z:
        # intersect within the same kind of solutions that "count" reports
        z_family = {"proper": PartitionFamily.discrete(spec.m), "all": None,
                    "nontrivial": partition_family(spec.A), "typed": family}[args.kind]
        counts["z_intersecting"] = census.count_intersecting(sols, z_family, args.z,
                                                             args.min_hits)
    kind = "total" if args.kind == "all" else args.kind
    counts["count"] = counts[kind]
    config = {"system": str(args.system), "n": args.n, "kind": args.kind,
              "partitions": args.partitions, "family": args.family if family else None,
              "z": args.z, "min_hits": args.min_hits}
    doc = _header("census", spec, config)
    doc["counts"] = counts
    if family is not None:
        doc["family"] = family.tolist()
    if args.list:
        doc["solutions"] = sols.values.tolist()
    _emit(doc, args.out)
    return EXIT_OK


def _normality(report: rm.MomentReport, args) -> dict:
    checks = {
        "skewness": abs(report.skewness) <= args.max_skew,
        "excess_kurtosis": abs(report.excess_kurtosis) <= args.max_kurtosis,
        "ks_distance": report.ks_distance <= args.max_ks,
    }
    moments = {}
    for k in (3, 4):
        c = rm.moment_goal_check(report, k)
        checks[f"moment_{k}"] = c.passed
        moments[str(k)] = {"target": c.target, "estimate": c.estimate, "margin": c.margin}
    return {"checks": checks, "moment_goal": moments, "passed": all(checks.values())}


def cmd_simulate(args) -> int:
    spec = load_system(args.system)
    family = _family(spec, args, args.n)
    cfg = rm.TrialConfig(args.n, args.p, args.trials, args.seed, args.kmax)
    sols = census.enumerate_solutions(spec, args.n)
    report = rm.run_trials(spec, family, cfg, sols=sols, workers=args.workers, force=args.force)
    verdict = _normality(report, args)
    # worker count is deliberately absent: it never changes the result
    config = {"system": str(args.system), "n": args.n, "p": args.p, "p_text": args.p_text,
              "trials": args.trials, "seed": args.seed, "kmax": args.kmax,
              "partitions": args.partitions, "family": args.family, "force": args.force,
              "max_skew": args.max_skew, "max_kurtosis": args.max_kurtosis,
              "max_ks": args.max_ks}
    doc = _header("simulate", spec, config)
    doc["properties"] = property_report(spec.A).to_dict()
    doc["family"] = family.tolist()
    doc["counts"] = {"typed": census.count_typed(sols, family), "total": len(sols)}
    doc["moments"] = report.to_dict()
    doc["normality"] = verdict
    _emit(doc, args.out)
    return EXIT_OK if verdict["passed"] else EXIT_NORMALITY


def cmd_compound(args) -> int:
    spec = load_system(args.system)
    A = spec.A
    lines = []
    if args.t is not None:
        if args.q is None or len(args.q) != 1:
            raise BadEmbedding("--t needs --q with exactly one column")
        res = compounded.milky_way_matrix(A, args.q[0], args.t)
    elif args.embedding:
        B = load_system(args.second).A if args.second else A
        try:
            pairs = json.loads(Path(args.embedding).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read embedding: {exc}") from None
        try:
            M = compounded.Embedding(tuple(pq) for pq in pairs)
        except (TypeError, ValueError) as exc:
            raise BadEmbedding(f"embedding must be a list of column pairs: {exc}") from None
        res = compounded.compound(A, B, M)
        rest = el.complement(B.cols, M.image)
        lower = el.rank(A) + (el.rank(el.select_columns(B, rest)) if rest else 0)
        lines.append(f"# rank_lower_bound {lower}")
    else:
        Q = list(range(1, A.cols + 1)) if args.q is None else args.q
        if any(not 1 <= q <= A.cols for q in Q):
            raise BadEmbedding(f"Q={Q} not within 1..{A.cols}")
        res = compounded.self_compound(A, Q)
    out = format_matrix(res.matrix)
    out += f"# rank {res.rank}\n"
    if res.predicted_rank is not None:
        out += f"# predicted_rank {res.predicted_rank}\n"
    out += "".join(ln + "\n" for ln in lines)
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = load_system(args.system)
    if not args.exponents:
        raise _UsageError("empty exponent grid")
    family = _family(spec, args, args.n)
    rows = rm.threshold_sweep(spec, family, args.n, args.exponents, args.trials, args.seed,
                              workers=args.workers)
    if args.trials < rm.LOW_POWER_TRIALS:
        print(f"warning: low power, only {args.trials} trials per exponent", file=sys.stderr)
    text = rm.sweep_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


class _UsageError(Exception):
    pass


def _add_family(p: argparse.ArgumentParser, default: str = "discrete") -> None:
    p.add_argument("--family", choices=FAMILIES, default=default,
                   help="solution types to count (default: %(default)s)")
    p.add_argument("--partitions", help="JSON file listing the partitions to count")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="linsolcount",
                     description="Count solutions of integer linear systems in random sets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="structural properties of a system")
    p.add_argument("system")
    p.add_argument("--density", action="store_true",
                   help="fail with exit 3 when the density is undefined")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("census", help="count solutions in [1, n]^m")
    p.add_argument("system")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--kind", choices=("proper", "nontrivial", "typed", "all"), default="proper")
    _add_family(p)
    p.add_argument("--z", type=_int_list, help="comma-separated values to intersect with")
    p.add_argument("--min-hits", type=_positive_int, default=1)
    p.add_argument("--list", action="store_true", help="include every solution")
    p.add_argument("--out")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("simulate", help="Monte Carlo counts in the binomial random set")
    p.add_argument("system")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--p", dest="p_text", required=True)
    p.add_argument("--trials", type=_positive_int, default=2000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--kmax", type=int, default=6)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--force", action="store_true", help="run even if preconditions fail")
    p.add_argument("--max-skew", type=float, default=0.2)
    p.add_argument("--max-kurtosis", type=float, default=0.6)
    p.add_argument("--max-ks", type=float, default=0.05)
    _add_family(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compound", help="compounded and milky-way matrices")
    p.add_argument("system")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--q", type=_int_list, help="shared columns (self compound)")
    g.add_argument("--embedding", help="JSON list of [column of A, column of B] pairs")
    p.add_argument("--second", help="system file for B (default: A itself)")
    p.add_argument("--t", type=_positive_int, help="milky-way construction with t extra copies")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compound)

    p = sub.add_parser("sweep", help="count statistics along p = n^-e")
    p.add_argument("system")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--exponents", type=_fraction_list, required=True)
    p.add_argument("--trials", type=_positive_int, default=200)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=_positive_int, default=1)
    _add_family(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    # argparse signals usage errors (and --help) with SystemExit; hand the
    # status back so in-process callers get a return code like everyone else
    try:
        return _run(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


def _run(argv: Optional[Sequence[str]]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate":
        try:
            args.p = _probability(args.p_text)
        except argparse.ArgumentTypeError as exc:
            parser.error(str(exc))
        if args.seed < 0:
            parser.error("--seed must be nonnegative")
    if args.command == "sweep" and args.seed < 0:
        parser.error("--seed must be nonnegative")
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.error(str(exc))
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (PreconditionError, BadEmbedding, NotAbundant, IndexOutOfRange, BadPartition) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (BoxTooLarge, TooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOX
    except DegenerateVariance as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except LinsolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
