"""Command line front end.

Commands: analyze, conditions, frobenius, selftest.  Documents are JSON
files; the bundled corpus is addressable as ``corpus:NAME``.  Exit
codes: 0 success/verified, 1 mathematical condition failure (with
--strict) or selftest failure, 2 input/schema error, 3 precision or
convergence error.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources

from .document import parse_document_file, parse_document_text
from .errors import PadicRigidError, InputError
from .frobenius import FrobLift, LocalModule, local_frobenius_structure
from .fuchsian import SingularPoint, validate_system
from .report import (
    VERDICT_FULL,
    analyze_document,
    build_lift,
    conditions_report_dict,
    default_method,
    render_json,
    render_text,
)
from .conditions import full_condition_report


def corpus_names():
    root = resources.files("padicrigid.corpus")
    return sorted(
        entry.name[:-5]
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    )


def load_document(spec):
    if spec.startswith("corpus:"):
        name = spec[len("corpus:"):].removesuffix(".json")
        root = resources.files("padicrigid.corpus")
        candidate = root / f"{name}.json"
        if not candidate.is_file():
            raise InputError(
                f"no bundled document {name!r}; available: "
                + ", ".join(corpus_names())
            )
        return parse_document_text(candidate.read_text(), spec)
    return parse_document_file(spec)


def _apply_precision(doc, text):
    if text is None:
        return doc
    try:
        x, m = text.split(":")
        x, m = int(x), int(m)
    except ValueError:
        raise InputError(f"--precision wants X:M (integers), got {text!r}")
    if x < 1 or m < 1:
        raise InputError("--precision values must be >= 1")
    doc.x_window = x
    doc.p_digits = m
    doc.precision_given = True
    return doc


def cmd_analyze(args, out):
    doc = _apply_precision(load_document(args.document), args.precision)
    report = analyze_document(doc, method=args.method)
    if args.figures:
        from .figures import render_figures

        written = render_figures(report, args.figures)
        report["figures"] = sorted(written)
    out.write(render_json(report) if args.json else render_text(report))
    if args.strict and report["verdict"] != VERDICT_FULL:
        return 1
    return 0


def cmd_conditions(args, out):
    doc = _apply_precision(load_document(args.document), args.precision)
    report = conditions_report_dict(doc)
    out.write(render_json(report) if args.json else render_text(report))
    cond = report["conditions"]
    ok = (
        cond["c1"]["pass"]
        and cond["c2"]["asserted"]
        and cond["c3"]["pass"]
        and cond["q"] is not None
    )
    if args.strict and not ok:
        return 1
    return 0


def cmd_frobenius(args, out):
    doc = _apply_precision(load_document(args.document), args.precision)
    validation = validate_system(doc.system)
    if not validation.valid:
        raise InputError(
            "invalid system: "
            + "; ".join(f["message"] for f in validation.failures)
        )
    target = SingularPoint.parse(args.point)
    local = next(
        (ld for ld in doc.system.locals if ld.point == target), None
    )
    if local is None:
        raise InputError(
            f"point not found: {args.point} is not a singular point "
            "of the document"
        )
    conditions = full_condition_report(doc.system, doc.prime)
    lift = build_lift(doc, conditions, doc.p_digits)
    if lift is None:
        raise InputError(
            "no Frobenius power available: supply frobenius.f or q in the "
            "document, or make the conditions eligible"
        )
    method = default_method(doc.prime, args.method)
    module = LocalModule(doc.prime, local.jordan.matrix())
    hi = doc.x_window if doc.precision_given else None
    result = local_frobenius_structure(
        module, lift, method, hi=hi, pcap=doc.p_digits
    )
    payload = {
        "schema": "padicrigid.frobenius.v1",
        "point": str(local.point),
        "prime": doc.prime,
    }
    payload.update(result.to_json_dict())
    if args.json:
        out.write(render_json(payload))
    else:
        out.write(f"point:              {payload['point']}\n")
        out.write(f"method:             {payload['method']}\n")
        out.write(f"q:                  {payload['q']}\n")
        out.write(
            f"residual valuation: {payload['residual_valuation']} "
            f"(threshold {payload['threshold']})\n"
        )
        out.write(f"window checked:     {payload['window_checked']}\n")
        out.write(f"verified:           {payload['verified']}\n")
        out.write("gauge:\n")
        for i, row in enumerate(payload["gauge"]):
            rendered = [
                " + ".join(
                    f"({t['value']}) x^{t['exponent']}" for t in entry
                )
                or "0"
                for entry in row
            ]
            out.write(f"  [{' | '.join(rendered)}]\n")
    if not result.verified:
        out.write("gauge not verified at the requested precision\n")
        return 3
    return 0


def cmd_selftest(args, out):
    from .selftest import run_selftest

    return run_selftest(out, json_mode=args.json)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--json", action="store_true", help="emit a JSON report"
    )
    common.add_argument(
        "--precision",
        metavar="X:M",
        help="x-window bound and p-adic digits (overrides the document)",
    )
    common.add_argument(
        "--strict",
        action="store_true",
        help="exit 1 when a mathematical condition fails",
    )
    common.add_argument(
        "--method",
        choices=("exp", "lifting"),
        help="gauge construction method (default: exp when p >= 3)",
    )

    parser = argparse.ArgumentParser(
        prog="padicrigid",
        description=(
            "decide cohomological rigidity from local data, check the "
            "p-adic conditions, and construct verified local Frobenius "
            "structures"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser(
        "analyze", parents=[common],
        help="full pipeline: validate, cohomology, conditions, gauges",
    )
    p_analyze.add_argument("document", help="document path or corpus:NAME")
    p_analyze.add_argument(
        "--figures", metavar="DIR",
        help="also render figures and summary.csv into DIR",
    )
    p_analyze.set_defaults(func=cmd_analyze)

    p_cond = sub.add_parser(
        "conditions", parents=[common],
        help="run only the condition checks and Frobenius power data",
    )
    p_cond.add_argument("document", help="document path or corpus:NAME")
    p_cond.set_defaults(func=cmd_conditions)

    p_frob = sub.add_parser(
        "frobenius", parents=[common],
        help="construct and verify one local Frobenius gauge",
    )
    p_frob.add_argument("document", help="document path or corpus:NAME")
    p_frob.add_argument(
        "--point", required=True, metavar="LOC",
        help="singular point (rational or inf)",
    )
    p_frob.set_defaults(func=cmd_frobenius)

    p_self = sub.add_parser(
        "selftest", parents=[common],
        help="run the bundled invariant suites at reduced sizes",
    )
    p_self.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except PadicRigidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
