"""Dynamic checks of type soundness over generated programs."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..checker import Checker, CheckerConfig
from ..diagnostics import Diagnostic
from ..frontend import parse_expr, parse_type, pretty
from ..implication import BuiltinOracle
from ..primitives import prim_type
from ..semantics import Value, evaluate, matching_rules, step
from ..syntax import (
    EMPTY, TRUE, Env, Expr, FreeVar, Func, Lam, Poly, Prim, RType, Refn, TBool,
    TInt, TLam, is_value, open_expr, open_pred, open_type,
)
from ..sysf import FBool, FFunc, FInt, FPoly, FTypeError, erase, erase_env, f_check_or_raise
from .gen import GenConfig, Generator, GiveUp, random_term


@dataclass
class Event:
    term: str
    goal: str
    step: int = 0
    detail: str = ""

    def as_dict(self) -> dict:
        return {"term": self.term, "goal": self.goal, "step": self.step, "detail": self.detail}


@dataclass
class SoundnessReport:
    termsGenerated: int = 0
    stepsTaken: int = 0
    stuckEvents: list[Event] = field(default_factory=list)
    preservationFailures: list[Event] = field(default_factory=list)
    canonicalFormViolations: list[Event] = field(default_factory=list)
    # a final value outside the denotation of its goal refinement
    refinementViolations: list[Event] = field(default_factory=list)
    # generated terms the checker under test rejects
    generatorRejections: list[Event] = field(default_factory=list)
    perturbedAccepted: int = 0
    outOfFuel: int = 0
    giveUps: int = 0

    @property
    def failures(self) -> int:
        return (
            len(self.stuckEvents) + len(self.preservationFailures) + len(self.canonicalFormViolations)
            + len(self.refinementViolations) + len(self.generatorRejections)
        )

    def as_dict(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            out[k] = [e.as_dict() for e in v] if isinstance(v, list) else v
        return out


def _describe(d: Diagnostic) -> str:
    r = d.root()
    return f"{r.code}: {r.message}"


def accepts(checker: Checker, env: Env, e: Expr, t: RType) -> Diagnostic | None:
    try:
        checker.check(env, e, t)
    except Diagnostic as d:
        return d
    return None


def canonical_violation(v: Expr, t: RType) -> str | None:
    """Does a closed value have one of the shapes its erased type allows?"""
    match erase(t):
        case FBool():
            ok = v in (Prim("true"), Prim("false"))
        case FInt():
            ok = isinstance(v, Prim) and v.tag == "int"
        case FFunc():
            ok = isinstance(v, Lam) or (isinstance(v, Prim) and isinstance(prim_type(v), Func))
        case FPoly():
            ok = isinstance(v, TLam) or (isinstance(v, Prim) and isinstance(prim_type(v), Poly))
        case _:
            ok = False
    return None if ok else f"{pretty(v)} is not a canonical value of {pretty(t)}"


def refinement_violation(v: Expr, t: RType, fuel: int) -> str | None:
    """For a refined base goal, evaluate the refinement at the final value."""
    if not isinstance(t, Refn) or t.pred == TRUE or not isinstance(t.base, (TInt, TBool)):
        return None
    r = evaluate(open_pred(t.pred, v), fuel)
    if isinstance(r, Value) and r.expr == TRUE:
        return None
    return f"{pretty(v)} does not satisfy {pretty(t)}"


def follow(checker: Checker, e: Expr, goal: RType, fuel: int, report: SoundnessReport) -> Expr | None:
    """Step e to a value, checking progress and preservation along the way."""
    shown = pretty(goal)
    cur, n = e, 0
    while not is_value(cur):
        if n >= fuel:
            report.outOfFuel += 1
            return None
        nxt = step(cur)
        if nxt is None:
            report.stuckEvents.append(Event(pretty(e), shown, n, pretty(cur)))
            return None
        n += 1
        report.stepsTaken += 1
        d = accepts(checker, EMPTY, nxt, goal)
        if d is not None:
            report.preservationFailures.append(Event(pretty(e), shown, n, f"{pretty(nxt)}  [{_describe(d)}]"))
            return None
        cur = nxt
    why = canonical_violation(cur, goal)
    if why:
        report.canonicalFormViolations.append(Event(pretty(e), shown, n, why))
    why = refinement_violation(cur, goal, fuel)
    if why:
        report.refinementViolations.append(Event(pretty(e), shown, n, why))
    return cur


def progress_preservation_run(cfg: GenConfig, config: CheckerConfig | None = None) -> SoundnessReport:
    """Generate closed programs, then evaluate each while re-checking every intermediate term.

    With `perturb` on, every program also yields a copy with one literal
    changed; if the checker accepts the copy it is followed the same way.
    """
    oracle = BuiltinOracle()
    gen = Generator(cfg, oracle)
    checker = Checker(oracle, config)
    report = SoundnessReport()
    for _ in range(cfg.terms):
        try:
            goal, e = gen.program()
        except GiveUp:
            continue
        report.termsGenerated += 1
        d = accepts(checker, EMPTY, e, goal)
        if d is not None:
            report.generatorRejections.append(Event(pretty(e), pretty(goal), 0, _describe(d)))
            continue
        follow(checker, e, goal, cfg.fuel, report)
        if cfg.perturb:
            pe = gen.perturb(e)
            if pe != e and accepts(checker, EMPTY, pe, goal) is None:
                report.perturbedAccepted += 1
                follow(checker, pe, goal, cfg.fuel, report)
    report.giveUps = gen.give_ups
    return report


MUTATIONS = {
    "no-selfify": CheckerConfig(selfify=False),
    "no-sbase-implication": CheckerConfig(sbase_implication=False),
}


def mutation_run(cfg: GenConfig) -> dict[str, SoundnessReport]:
    """The same run against deliberately broken checkers; each should report failures."""
    return {name: progress_preservation_run(cfg, conf) for name, conf in MUTATIONS.items()}


@dataclass
class CountReport:
    """Generic tally for the smaller property runs."""

    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {"checked": self.checked, "failures": list(self.failures)}


def _programs(cfg: GenConfig):
    gen = Generator(cfg)
    for _ in range(cfg.terms):
        try:
            yield gen.program()
        except GiveUp:
            continue


def canonical_forms_run(cfg: GenConfig) -> CountReport:
    """Every closed value produced by evaluation has a canonical shape for its type."""
    out = CountReport()
    for goal, e in _programs(cfg):
        r = evaluate(e, cfg.fuel)
        if not isinstance(r, Value):
            continue
        out.checked += 1
        why = canonical_violation(r.expr, goal)
        if why:
            out.failures.append(why)
    return out


def substitution_run(cfg: GenConfig) -> CountReport:
    """From x:tx ⊢ e : t and ⊢ v : tx, the checker accepts e[v/x] at t[v/x]."""
    gen = Generator(cfg)
    oracle = BuiltinOracle()
    checker = Checker(oracle)
    out = CountReport()
    for _ in range(cfg.terms):
        goal = gen.func_goal()
        try:
            lam = gen.gen(EMPTY, goal, cfg.size)
            value = gen.gen(EMPTY, goal.arg, 1)
        except GiveUp:
            continue
        x = gen.supply.fresh("x")
        env = EMPTY.bind(x, goal.arg)
        body = open_expr(lam.body, x)
        if accepts(checker, env, body, open_type(goal.res, x)) is not None:
            continue
        out.checked += 1
        d = accepts(checker, EMPTY, open_expr(lam.body, value), open_type(goal.res, value))
        if d is not None:
            out.failures.append(f"{pretty(body)} with {pretty(FreeVar(x))} := {pretty(value)}: {_describe(d)}")
    return out


def erasure_run(cfg: GenConfig, extra: list[tuple[Env, Expr, RType]] = ()) -> CountReport:
    """Every judgment the refinement checker accepts also holds after erasure."""
    checker = Checker()
    out = CountReport()
    cases = [(EMPTY, e, t) for t, e in _programs(cfg)] + list(extra)
    for env, e, t in cases:
        if accepts(checker, env, e, t) is not None:
            continue
        out.checked += 1
        try:
            f_check_or_raise(erase_env(env), e, erase(t))
        except FTypeError as err:
            out.failures.append(f"{pretty(e)} : {pretty(t)} rejected after erasure: {err.message}")
    return out


def determinism_run(n: int = 10_000, seed: int = 42) -> CountReport:
    """At most one reduction rule matches any term, and values match none."""
    rng = random.Random(seed)
    out = CountReport()
    for _ in range(n):
        e = random_term(rng, depth=rng.randint(1, 5))
        rules = matching_rules(e)
        out.checked += 1
        if len(rules) > 1:
            out.failures.append(f"{pretty(e)} matches {rules}")
        elif is_value(e) and (rules or step(e) is not None):
            out.failures.append(f"value {pretty(e)} steps")
    return out


def round_trip_run(cfg: GenConfig) -> CountReport:
    """Printing then parsing gives back the same tree, for terms, goals and synthesized types."""
    checker = Checker()
    out = CountReport()

    def same(x, back):
        out.checked += 1
        if back != x:
            out.failures.append(f"{pretty(x)} reparsed differently")

    for goal, e in _programs(cfg):
        # terms are reparsed against their goal, as definitions are against signatures
        for attempt in (
            lambda: same(goal, parse_type(pretty(goal))),
            lambda: same(e, parse_expr(pretty(e), expected=goal)),
        ):
            try:
                attempt()
            except Exception as exc:  # parse or elaboration error is a failure
                out.failures.append(f"{pretty(e)}: {exc}")
        try:
            t = checker.synth(EMPTY, e)
        except Diagnostic:
            continue
        try:
            same(t, parse_type(pretty(t)))
        except Exception as exc:
            out.failures.append(f"{pretty(t)}: {exc}")
    return out
