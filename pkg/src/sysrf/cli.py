"""`rfc`: check, run and inspect `.rf` programs."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .diagnostics import Diagnostic, ParseError
from .driver import (
    EXIT_FUEL, EXIT_INTERNAL, EXIT_OK, EXIT_PARSE, EXIT_STUCK, CheckReport,
    check_program, run_program,
)
from .frontend import parse_program, pretty, pretty_query
from .implication import BuiltinOracle, ExternalOracle, OracleError, RecordingOracle
from .semantics import DEFAULT_FUEL, OutOfFuel, Stuck


def _span_dict(span, file: str):
    if span is None:
        return None
    return {"file": file, **span.as_dict()}


def diagnostic_json(d: Diagnostic, file: str, definition: str | None = None) -> dict:
    root = d.root()
    out = {
        "code": root.code,
        "message": root.message,
        "span": _span_dict(d.span or root.span, file),
        "rule": root.rule,
    }
    if root.query is not None:
        out["query"] = pretty_query(root.query)
    if definition is not None:
        out["definition"] = definition
    trail = d.trail or root.trail
    if trail:
        out["trail"] = trail
    return out


def _print_diagnostic(d: Diagnostic, file: str, definition: str | None = None):
    j = diagnostic_json(d, file, definition)
    where = f"{file}:{d.span}" if d.span else file
    who = f" in {definition}" if definition else ""
    print(f"{where}: error[{j['code']}]{who}: {j['message']}", file=sys.stderr)
    if j["rule"]:
        print(f"  rule: {j['rule']}", file=sys.stderr)
    if "query" in j:
        print(f"  query: {j['query']}", file=sys.stderr)
    if "trail" in j:
        print(f"  via: {' > '.join(j['trail'])}", file=sys.stderr)


def _load(path: str):
    """Returns (program, None) or (None, exit code) after reporting the problem."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        print(f"{path}: cannot read: {exc.strerror}", file=sys.stderr)
        return None, EXIT_INTERNAL
    try:
        return parse_program(text, path), None
    except ParseError as err:
        where = f"{path}:{err.span}" if err.span else path
        print(f"{where}: parse error: {err.message}", file=sys.stderr)
        return None, EXIT_PARSE
    except Diagnostic as d:
        _print_diagnostic(d, path)
        return None, 1


def _oracle(kind: str):
    return ExternalOracle() if kind == "external" else BuiltinOracle()


def _report(report: CheckReport, as_json: bool) -> int:
    if as_json:
        doc = {
            "file": report.file,
            "ok": report.ok,
            "exitCode": report.exit_code,
            "diagnostics": [diagnostic_json(o.diagnostic, report.file, o.name) for o in report.failures],
        }
        print(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False))
        return report.exit_code
    for o in report.failures:
        _print_diagnostic(o.diagnostic, report.file, o.name)
    if report.ok:
        n = sum(1 for o in report.outcomes if o.name != "main")
        print(f"{report.file}: ok ({n} definitions)")
        for o in report.outcomes:
            if o.name == "main":
                print(f"main : {pretty(o.type)}")
    return report.exit_code


def cmd_check(args) -> int:
    prog, code = _load(args.file)
    if prog is None:
        if args.json:
            print(json.dumps({"file": args.file, "ok": False, "exitCode": code, "diagnostics": []}))
        return code
    return _report(check_program(prog, _oracle(args.smt)), args.json)


def cmd_run(args) -> int:
    prog, code = _load(args.file)
    if prog is None:
        return code
    report = check_program(prog, _oracle(args.smt))
    if not report.ok:
        return _report(report, False)
    if prog.main is None:
        print(f"{args.file}: no main expression to run", file=sys.stderr)
        return EXIT_INTERNAL
    result = run_program(prog, args.fuel)
    match result:
        case Stuck(term, reason, _):
            print(f"stuck: {reason}\n  at: {pretty(term)}", file=sys.stderr)
            return EXIT_STUCK
        case OutOfFuel(_, steps):
            print(f"out of fuel after {steps} steps", file=sys.stderr)
            return EXIT_FUEL
    print(pretty(result.expr))
    return EXIT_OK


def cmd_emit_smt(args) -> int:
    prog, code = _load(args.file)
    if prog is None:
        return code
    oracle = RecordingOracle(BuiltinOracle())
    report = check_program(prog, oracle)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.file).stem
    for i, (query, verdict) in enumerate(oracle.log):
        header = f"; {pretty_query(query)}\n; builtin verdict: {type(verdict).__name__}\n"
        (out / f"{stem}-{i:03d}.smt2").write_text(header + query.smtlib(pretty))
    print(f"wrote {len(oracle.log)} queries to {out}")
    for o in report.failures:
        _print_diagnostic(o.diagnostic, report.file, o.name)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .harness import selftest

    report = selftest(terms=args.terms, seed=args.seed)
    if args.json:
        print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    else:
        print(report.text())
    return EXIT_OK if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rfc", description="Refinement type checker for .rf programs")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="type check every definition")
    p.add_argument("file")
    p.add_argument("--smt", choices=("builtin", "external"), default="builtin")
    p.add_argument("--json", action="store_true", help="print diagnostics as JSON on stdout")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="check, then evaluate main")
    p.add_argument("file")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--smt", choices=("builtin", "external"), default="builtin")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("emit-smt", help="write each implication query as SMT-LIB2")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_emit_smt)

    p = sub.add_parser("selftest", help="run the requirement suites and the soundness harness")
    p.add_argument("--terms", type=int, default=200)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OracleError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except RecursionError:
        print("internal error: recursion limit reached", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
