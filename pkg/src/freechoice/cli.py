"""Command-line front end.

Exit codes: 0 on success, 1 when ``--fail-on-not-free`` is set and some
audited variable is not free, 2 on usage, parse or semantic errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence, TextIO

from . import __version__
from .dsl import ScenarioError, export_scenario, parse_scenario_file
from .errors import FreeChoiceError, UnknownDemo
from .freedom import FreedomVerdict, audit, is_free, is_free_past_only
from .sampling import DEFAULT_ALPHAS, GTestResult, g_test, read_samples, sample, write_samples
from .scenarios import Scenario, correlated_settings, pr_box, shared_coin, single_measurement, singlet

EXIT_OK = 0
EXIT_NOT_FREE = 1
EXIT_USAGE = 2

DEMOS = {
    "single": single_measurement,
    "counterexample": correlated_settings,
    "prbox": pr_box,
    "singlet": singlet,
    "lhv": shared_coin,
}


class UsageError(FreeChoiceError):
    pass


# -- formatting ------------------------------------------------------------


def _fmt(p) -> str:
    if isinstance(p, Fraction):
        return str(p)
    return f"{p:.6g}"


def _assign(a: dict) -> str:
    return ",".join(f"{k}={v}" for k, v in a.items())


def witness_text(v: FreedomVerdict) -> str:
    w = v.witness
    if w is None:
        return "-"
    s, r = _assign(w.subject_assignment), _assign(w.reference_assignment)
    return f"P({s},{r})={_fmt(w.lhs)} vs P({s})P({r})={_fmt(w.rhs)}, deviation {_fmt(w.deviation)}"


def verdict_json(v: FreedomVerdict) -> dict:
    w = v.witness
    return {
        "subject": v.subject,
        "free": v.free,
        "criterion": v.criterion.value,
        "reference_set": list(v.reference_set),
        "witness": None
        if w is None
        else {
            "subject_assignment": dict(w.subject_assignment),
            "reference_assignment": dict(w.reference_assignment),
            "lhs": float(w.lhs),
            "rhs": float(w.rhs),
            "deviation": float(w.deviation),
        },
    }


def _set(names) -> str:
    return "{" + ", ".join(names) + "}"


def _table(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for r in rows:
        cells = [c.ljust(w) for c, w in zip(r[:-1], widths[:-1])] + [r[-1]]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def audit_report(sc: Scenario, verdicts, past=None) -> str:
    d = sc.distribution
    head = f"scenario: {sc.name} ({d.mode}, {len(d.variables)} variables)"
    rows = [["variable", "free", "reference set"]]
    if past is not None:
        rows[0] += ["past-only free", "past set"]
    rows[0].append("witness")
    for i, v in enumerate(verdicts):
        row = [v.subject, "yes" if v.free else "no", _set(v.reference_set)]
        if past is not None:
            row += ["yes" if past[i].free else "no", _set(past[i].reference_set)]
        row.append(witness_text(v))
        rows.append(row)
    note = "criterion: PaperDefinition (independent of the joint of every variable outside its causal future; empty set means vacuously free)"
    return "\n".join([head, note, "", _table(rows)])


# -- commands ----------------------------------------------------------------


def _load(path: str) -> Scenario:
    return parse_scenario_file(path).parsed


def _need_dist(sc: Scenario, path: str) -> None:
    if sc.distribution is None:
        raise UsageError(f"{path}: semantic error: scenario has no 'dist' block (required for this command)")


def _select(sc: Scenario, only: str | None) -> list[str]:
    if not only:
        return list(sc.labels)
    names = [n.strip() for n in only.split(",") if n.strip()]
    for n in names:
        if n not in sc.labels:
            raise UsageError(f"unknown variable {n!r}")
    return names


def _audit_payload(sc: Scenario, names, past_only: bool):
    d, o = sc.distribution, sc.order
    verdicts = [is_free(d, o, a) for a in names] if names != list(o.labels) else audit(d, o)
    past = [is_free_past_only(d, o, a) for a in names] if past_only else None
    return verdicts, past


def _emit_audit(sc, verdicts, past, args, out: TextIO) -> int:
    if args.json:
        payload = {
            "scenario": sc.name,
            "mode": sc.distribution.mode,
            "verdicts": [verdict_json(v) for v in verdicts],
        }
        if past is not None:
            payload["past_only_verdicts"] = [verdict_json(v) for v in past]
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        out.write(audit_report(sc, verdicts, past) + "\n")
    if args.fail_on_not_free and not all(v.free for v in verdicts):
        return EXIT_NOT_FREE
    return EXIT_OK


def cmd_audit(args, out: TextIO) -> int:
    sc = _load(args.file)
    _need_dist(sc, args.file)
    verdicts, past = _audit_payload(sc, _select(sc, args.vars), args.past_only)
    return _emit_audit(sc, verdicts, past, args, out)


def cmd_derive_order(args, out: TextIO) -> int:
    sc = _load(args.file)
    if sc.embedding is None:
        raise UsageError(f"{args.file}: MissingSpacetimeBlock: derive-order needs a 'spacetime {{ ... }}' block")
    o = sc.order
    edges, unordered = o.edges(), o.unordered_pairs()
    if args.json:
        payload = {"scenario": sc.name, "edges": [list(e) for e in edges], "mutually_unordered": [list(p) for p in unordered]}
        out.write(json.dumps(payload, indent=2) + "\n")
        return EXIT_OK
    out.write(f"scenario: {sc.name}\n")
    out.write(f"edges ({len(edges)}):\n")
    for a, b in edges:
        out.write(f"  {a} -> {b}\n")
    out.write(f"mutually unordered ({len(unordered)}):\n")
    for a, b in unordered:
        out.write(f"  {a}, {b}\n")
    return EXIT_OK


def cmd_sample(args, out: TextIO) -> int:
    sc = _load(args.file)
    _need_dist(sc, args.file)
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    s = sample(sc.distribution, args.n, args.seed, workers=args.workers)
    write_samples(s, args.out)
    if args.json:
        out.write(json.dumps({"n": s.n, "seed": s.seed, "out": args.out, "variables": list(s.variables)}) + "\n")
    else:
        out.write(f"wrote {s.n} samples (seed {s.seed}) of {','.join(s.variables)} to {args.out}\n")
    return EXIT_OK


def gtest_json(r: GTestResult) -> dict:
    return {
        "statistic": r.statistic,
        "degrees_of_freedom": r.degrees_of_freedom,
        "p_value": r.p_value,
        "reject_at": {repr(a): rej for a, rej in r.reject_at.items()},
        "warnings": list(r.warnings),
    }


def cmd_gtest(args, out: TextIO) -> int:
    s = read_samples(args.datafile)
    lhs = [n.strip() for n in args.lhs.split(",") if n.strip()]
    rhs = [n.strip() for n in args.rhs.split(",") if n.strip()]
    alphas = args.alpha or list(DEFAULT_ALPHAS)
    for a in alphas:
        if not 0 < a < 1:
            raise UsageError(f"--alpha must lie in (0, 1), got {a}")
    r = g_test(s, lhs, rhs, alphas)
    if args.json:
        out.write(json.dumps(gtest_json(r), indent=2) + "\n")
        return EXIT_OK
    out.write(f"G-test of {{{','.join(lhs)}}} vs {{{','.join(rhs)}}} on {s.n} samples\n")
    out.write(f"G = {r.statistic:.6g}\ndf = {r.degrees_of_freedom}\np-value = {r.p_value:.6g}\n")
    for a, rej in r.reject_at.items():
        out.write(f"alpha {a:g}: {'reject independence' if rej else 'do not reject'}\n")
    for w in r.warnings:
        out.write(f"warning: {w}\n")
    return EXIT_OK


COUNTEREXAMPLE_NOTE = (
    "Both settings are independent of the source Z, which is their whole causal "
    "past ({past_a} for A, {past_b} for B), so the past-only variant calls them free. "
    "Yet A and B are perfectly correlated. The definition tests each setting against "
    "everything outside its causal future ({ref_a} for A, {ref_b} for B), which "
    "includes the other setting, and so rejects both."
)


def cmd_demo(args, out: TextIO) -> int:
    if args.name not in DEMOS:
        raise UnknownDemo(f"unknown demo {args.name!r}; choose from {', '.join(DEMOS)}")
    sc = DEMOS[args.name]()
    if args.export:
        out.write(export_scenario(sc))
        return EXIT_OK
    names = list(sc.labels)
    past_only = args.past_only or args.name == "counterexample"
    verdicts, past = _audit_payload(sc, names, past_only)
    if args.name != "counterexample" or args.json:
        return _emit_audit(sc, verdicts, past, args, out)
    d, o = sc.distribution, sc.order
    for a in ("A", "B"):
        p, q = is_free(d, o, a), is_free_past_only(d, o, a)
        out.write(f"PaperDefinition: {a} {'free' if p.free else 'not free'}  (reference set {_set(p.reference_set)})\n")
        out.write(f"PastOnlyVariant: {a} {'free' if q.free else 'not free'}  (reference set {_set(q.reference_set)})\n")
        if p.witness is not None:
            out.write(f"  witness: {witness_text(p)}\n")
    out.write("\n")
    out.write(
        COUNTEREXAMPLE_NOTE.format(
            past_a=_set(o.strict_past("A")),
            past_b=_set(o.strict_past("B")),
            ref_a=_set(o.non_future("A")),
            ref_b=_set(o.non_future("B")),
        )
        + "\n\n"
    )
    out.write(audit_report(sc, verdicts, past) + "\n")
    if args.fail_on_not_free and not all(v.free for v in verdicts):
        return EXIT_NOT_FREE
    return EXIT_OK


# -- argument parsing --------------------------------------------------------


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else False
    p.add_argument("--json", action="store_true", default=default, help="structured JSON output")
    p.add_argument(
        "--fail-on-not-free",
        action="store_true",
        default=default,
        help="exit with status 1 if any audited variable is not free",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freechoice",
        description="Decide which variables of a finite probability model are free choices under a causal order.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("audit", parents=[common], help="free-choice verdict for every variable of a scenario file")
    p.add_argument("file")
    p.add_argument("--past-only", action="store_true", help="add the past-only variant as an extra column")
    p.add_argument("--vars", metavar="A,B", help="audit only these variables")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("derive-order", parents=[common], help="causal order implied by a spacetime block")
    p.add_argument("file")
    p.set_defaults(func=cmd_derive_order)

    p = sub.add_parser("sample", parents=[common], help="draw seeded samples from a scenario's distribution")
    p.add_argument("file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output sample file")
    p.add_argument("--workers", type=int, default=1, help="threads for batch sampling (output is identical)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("gtest", parents=[common], help="G-test of independence on a sample file")
    p.add_argument("datafile")
    p.add_argument("--lhs", required=True, metavar="A[,B...]")
    p.add_argument("--rhs", required=True, metavar="C[,D...]")
    p.add_argument("--alpha", type=float, action="append", help="significance level (repeatable)")
    p.set_defaults(func=cmd_gtest)

    p = sub.add_parser("demo", parents=[common], help=f"built-in scenario: {', '.join(DEMOS)}")
    p.add_argument("name")
    p.add_argument("--past-only", action="store_true")
    p.add_argument("--export", action="store_true", help="print the scenario file instead of auditing")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args, out)
    except ScenarioError as exc:
        err.write(f"{exc}\n")
    except (FreeChoiceError, OSError) as exc:
        err.write(f"error: {exc}\n")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
