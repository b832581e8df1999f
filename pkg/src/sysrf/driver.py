"""Checking and running whole programs."""

from __future__ import annotations

from dataclasses import dataclass, field

from .checker import Checker, CheckerConfig
from .diagnostics import Diagnostic
from .frontend import ElaboratedProgram
from .implication import Oracle
from .semantics import DEFAULT_FUEL, EvalResult, evaluate
from .syntax import RType

EXIT_OK, EXIT_TYPE, EXIT_PARSE, EXIT_STUCK, EXIT_FUEL, EXIT_INTERNAL = range(6)


@dataclass
class Outcome:
    name: str
    diagnostic: Diagnostic | None = None
    type: RType | None = None

    @property
    def ok(self) -> bool:
        return self.diagnostic is None


@dataclass
class CheckReport:
    file: str
    outcomes: list[Outcome] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(o.ok for o in self.outcomes)

    @property
    def failures(self) -> list[Outcome]:
        return [o for o in self.outcomes if not o.ok]

    @property
    def exit_code(self) -> int:
        fails = self.failures
        if not fails:
            return EXIT_OK
        if all(o.diagnostic.root().code == "ImplicationUnknown" for o in fails):
            return EXIT_INTERNAL
        return EXIT_TYPE


def check_program(
    prog: ElaboratedProgram, oracle: Oracle | None = None, config: CheckerConfig | None = None
) -> CheckReport:
    """Check each definition against its signature in the scope of the ones before it."""
    report = CheckReport(prog.file)
    for i, d in enumerate(prog.defs):
        env = prog.env_before(i)
        checker = Checker(oracle, config)
        out = Outcome(d.name.hint, type=d.signature)
        try:
            checker.wf_type(env, d.signature)
            checker.check(env, d.body, d.signature)
        except Diagnostic as diag:
            diag.span = diag.span or d.span
            out.diagnostic = diag
        report.outcomes.append(out)
    if prog.main is not None:
        checker = Checker(oracle, config)
        out = Outcome("main")
        try:
            out.type = checker.synth(prog.env(), prog.main)
        except Diagnostic as diag:
            diag.span = diag.span or prog.main_span
            out.diagnostic = diag
        report.outcomes.append(out)
    return report


def run_program(prog: ElaboratedProgram, fuel: int = DEFAULT_FUEL) -> EvalResult:
    return evaluate(prog.as_expr(), fuel)
