"""Command-line front end.

Exit codes are shared by every command: 0 success (valid, certified,
recognized), 1 a negative finding (invalid, counterexample, no partition)
and 2 a usage, parse or budget error.
"""

from __future__ import annotations

import argparse
import sys

from . import zvformat
from .errors import BudgetExceeded, MissingNestedPartition, ZvError
from .families import FAMILY_NAMES, FamilySpec, generate
from .mechanisms import mechanism_from_spec
from .oracle import DEFAULT_BUDGET, CertificationConfig, PropertyClass, certify, default_jobs, find_deviation
from .preference import pareto_set
from .recognize import DEFAULT_BUDGET as RECOGNIZE_BUDGET
from .recognize import DEFAULT_MAX_VERTICES, count_zv_line_partitions, recognize_zv_line
from .structure import validate_partition, validate_zv_line

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


class _Usage(Exception):
    pass


def _ballots(text: str | None) -> list[str]:
    if not text:
        return []
    return [b.strip() for b in text.split(",") if b.strip()]


def _profile(args, g) -> list[str]:
    if args.ordered_ballots is not None and args.ballots is not None:
        raise _Usage("give either --ballots or --ordered-ballots, not both")
    if args.ordered_ballots is not None:
        return _ballots(args.ordered_ballots)
    # a multiset: canonical order, identities carry no meaning
    return list(g.sorted(_ballots(args.ballots))) if args.ballots else []


def cmd_validate(args, out) -> int:
    f = zvformat.read(args.file)
    if f.partition is None:
        print("no partition in file", file=out)
        return EXIT_NEGATIVE
    base = validate_partition(f.graph, f.partition)
    print(f"partition: {base}", file=out)
    try:
        line = validate_zv_line(f.graph, f.partition)
    except MissingNestedPartition as exc:
        raise _Usage(f"cannot check ZV-line structure: {exc}") from None
    print(f"zv-line: {line}", file=out)
    return EXIT_OK if line.valid else EXIT_NEGATIVE


def cmd_run(args, out) -> int:
    f = zvformat.read(args.file)
    m = mechanism_from_spec(args.mechanism, f.graph, f.partition, allow_weighted=args.allow_weighted)
    outcome = m.run(_profile(args, f.graph))
    print(outcome.vertex, file=out)
    if args.trace:
        for step in outcome.trace:
            print(f"  {step}", file=out)
    return EXIT_OK


def cmd_pareto(args, out) -> int:
    f = zvformat.read(args.file)
    po = pareto_set(f.graph, _ballots(args.ballots))
    print(" ".join(f.graph.sorted(po)), file=out)
    return EXIT_OK


def _classes(values: list[str] | None) -> frozenset[PropertyClass]:
    if not values:
        return frozenset({PropertyClass.GROUP})
    return frozenset(PropertyClass.parse(t) for v in values for t in v.split(",") if t.strip())


def cmd_audit(args, out) -> int:
    f = zvformat.read(args.file)
    m = mechanism_from_spec(args.mechanism, f.graph, f.partition, allow_weighted=args.allow_weighted)
    cfg = CertificationConfig(
        max_agents=args.agents,
        ballot_cap=args.ballot_cap,
        tau_list=tuple(args.tau),
        property_classes=_classes(args.property),
        budget=args.budget,
        jobs=args.jobs,
    )
    if args.full:
        report = certify(f.graph, m, cfg)
        for line in report.lines():
            print(line, file=out)
        return EXIT_OK if report.ok else EXIT_NEGATIVE
    found = find_deviation(f.graph, m, cfg)
    if found is None:
        print(f"certified mechanism={m.describe()} agents<={cfg.max_agents} cap={cfg.ballot_cap}", file=out)
        return EXIT_OK
    print(found.record(), file=out)
    return EXIT_NEGATIVE


def cmd_recognize(args, out) -> int:
    f = zvformat.read(args.file)
    if args.count:
        print(f"partitions {count_zv_line_partitions(f.graph, budget=args.budget)}", file=out)
        return EXIT_OK
    p = recognize_zv_line(f.graph, max_vertices=args.max_vertices, budget=args.budget)
    if p is None:
        print("none", file=out)
        return EXIT_NEGATIVE
    text = zvformat.emit(f.graph, p)
    if args.partition_only:
        text = text[text.index("Z:"):]
    out.write(text)
    return EXIT_OK


def _family_param(text: str):
    try:
        if "," in text:
            return tuple(int(t) for t in text.split(",") if t)
        return int(text)
    except ValueError:
        raise _Usage(f"family parameters are integers or comma lists, got {text!r}") from None


def cmd_family(args, out) -> int:
    ag = generate(FamilySpec(args.name, tuple(_family_param(p) for p in args.params)))
    meta = {"family": ag.provenance, **ag.notes}
    text = zvformat.emit(ag.graph, ag.partition, meta)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zvline", description="ZV-line graphs and manipulation-resistant facility location.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the partition in a zvgraph file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    def ballots(p):
        p.add_argument("--ballots", help="comma-separated multiset of locations")
        p.add_argument("--ordered-ballots", help="comma-separated ballots in agent order (for dictator)")

    def mechanism(p):
        p.add_argument(
            "--mechanism",
            default="fstar",
            help="fstar | order:v1,.. | lca:root | block:anchor[:order] | median[:order] | mean[:order] | fixed:v | dictator:i",
        )
        p.add_argument("--allow-weighted", action="store_true", help="run F* on a weighted graph")

    p = sub.add_parser("run", help="run a mechanism on a profile")
    p.add_argument("file")
    mechanism(p)
    ballots(p)
    p.add_argument("--trace", action="store_true", help="print the decision trace")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("pareto", help="Pareto-optimal locations of a profile")
    p.add_argument("file")
    p.add_argument("--ballots")
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("audit", help="search for beneficial deviations")
    p.add_argument("file")
    mechanism(p)
    p.add_argument("--agents", type=int, default=3)
    p.add_argument("--ballot-cap", type=int, default=3)
    p.add_argument("--property", action="append", help="misreport, abstention, falsename or group (repeatable)")
    p.add_argument("--full", action="store_true", help="full sweep plus property suites")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default $ZVLINE_JOBS or 1)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum triples to examine")
    p.add_argument("--tau", type=int, nargs="+", default=[1, 2, 3], help="saturation multiplicities")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("recognize", help="search for a ZV-line partition")
    p.add_argument("file")
    p.add_argument("--budget", type=int, default=RECOGNIZE_BUDGET)
    p.add_argument("--max-vertices", type=int, default=DEFAULT_MAX_VERTICES)
    p.add_argument("--count", action="store_true", help="count all witnesses (graphs up to 8 vertices)")
    p.add_argument("--partition-only", action="store_true", help="print only the partition section")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("family", help="emit a named fixture")
    p.add_argument("name", choices=FAMILY_NAMES)
    p.add_argument("params", nargs="*", help="integers, or comma lists for block_graph")
    p.add_argument("--out")
    p.set_defaults(func=cmd_family)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ZvError, _Usage, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
