"""Executable obligations on primitives and on the implication oracle."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..checker import Checker
from ..diagnostics import Diagnostic
from ..frontend import pretty, pretty_query
from ..implication import BuiltinOracle, Invalid, Oracle, Unknown, Valid, make_query
from ..implication.formula import evaluate as eval_formula
from ..primitives import delta, delta_t, prim_type, sample_primitives
from ..substitution import open_tyvar_with, subFV
from ..syntax import (
    BOOL, EMPTY, INT, TRUE, App, BoundVar, Env, Expr, FreeVar, Func, Kind, NameSupply, Poly,
    Prim, Refn, TBool, TInt, bool_, int_, mk_and, mk_eq, mk_leq, mk_not, open_pred, open_type,
)
from ..sysf import erase


@dataclass
class SuiteReport:
    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {"name": self.name, "checks": self.checks, "failures": list(self.failures), **self.notes}


def canonical_values(t: Refn, lo: int = -3, hi: int = 3) -> list[Expr]:
    match t.base:
        case TBool():
            return [TRUE, bool_(False)]
        case TInt():
            return [int_(n) for n in range(lo, hi + 1)]
    return []


def requirement_primitives(lo: int = -3, hi: int = 3) -> SuiteReport:
    """Each constant is well-formed at the right kind, and each table entry has its declared type."""
    rep = SuiteReport("primitives")
    checker = Checker()

    def holds(what: str, thunk):
        rep.checks += 1
        try:
            ok = thunk()
        except Diagnostic as d:
            rep.failures.append(f"{what}: {d.root().code}: {d.root().message}")
            return
        if ok is False:
            rep.failures.append(what)

    for c in sample_primitives(lo, hi):
        t = prim_type(c)
        want = Kind.BASE if isinstance(t, Refn) else Kind.STAR
        holds(f"ty({pretty(c)}) is well-formed at {want.value}", lambda: checker.wf_type(EMPTY, t) is want)
        match t:
            case Refn(_, pred, _):
                # the constant satisfies its own refinement
                holds(
                    f"{pretty(c)} satisfies {pretty(t)}",
                    lambda: isinstance(checker.oracle.check_impl(EMPTY, TRUE, open_pred(pred, c))[0], Valid),
                )
            case Func(arg, res, _):
                for v in canonical_values(arg, lo, hi):
                    r = delta(c, v)
                    if r is None:
                        rep.checks += 1
                        rep.failures.append(f"delta({pretty(c)}, {pretty(v)}) is undefined")
                        continue
                    goal = open_type(res, v)
                    holds(
                        f"delta({pretty(c)}, {pretty(v)}) = {pretty(r)} checks at {pretty(goal)}",
                        lambda: checker.check(EMPTY, r, goal),
                    )
            case Poly(_, body, _):
                for inst in (BOOL, INT):
                    r = delta_t(c, erase(inst))
                    if r is None:
                        rep.checks += 1
                        rep.failures.append(f"delta_T({pretty(c)}, {pretty(inst)}) is undefined")
                        continue
                    goal = open_tyvar_with(body, inst)
                    holds(
                        f"delta_T({pretty(c)}, {pretty(inst)}) = {pretty(r)} checks at {pretty(goal)}",
                        lambda: checker.check(EMPTY, r, goal),
                    )
    return rep


# ---------------------------------------------------------------- implication battery


class _Preds:
    """Random predicates over a small environment of integer and boolean variables."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.supply = NameSupply()

    def env(self) -> Env:
        env = EMPTY
        for _ in range(self.rng.randint(1, 3)):
            x = self.supply.fresh("n")
            refs = [TRUE, mk_leq(TInt(), int_(0), _V), mk_leq(TInt(), _V, int_(self.rng.randint(-2, 5)))]
            env = env.bind(x, Refn(TInt(), self.rng.choice(refs)))
        for _ in range(self.rng.randint(0, 2)):
            env = env.bind(self.supply.fresh("b"), BOOL)
        return env

    def int_atom(self, ints):
        if ints and self.rng.random() < 0.75:
            return FreeVar(self.rng.choice(ints))
        return int_(self.rng.randint(-3, 3))

    def pred(self, env: Env, depth: int = 3) -> Expr:
        ints = [b.name for b in env.term_binds() if b.ty.base == TInt()]
        bools = [b.name for b in env.term_binds() if b.ty.base == TBool()]
        r = self.rng.random()
        if depth <= 0 or r < 0.35:
            if bools and self.rng.random() < 0.25:
                return FreeVar(self.rng.choice(bools))
            a, b = self.int_atom(ints), self.int_atom(ints)
            return self.rng.choice([mk_leq, mk_eq])(TInt(), a, b)
        if r < 0.5:
            return mk_not(self.pred(env, depth - 1))
        op = self.rng.choice(["and", "and", "or", "iff"])
        return App(App(Prim(op), self.pred(env, depth - 1)), self.pred(env, depth - 1))


_V = BoundVar(0)


def requirement_implication(n: int = 200, seed: int = 42, oracle: Oracle | None = None) -> SuiteReport:
    """Axioms of the implication relation on random queries, judged at the verdict level.

    A contradiction is a verdict of Invalid where an axiom demands Valid.
    Unknown verdicts are counted but never contradict.
    """
    rng = random.Random(seed)
    oracle = oracle or BuiltinOracle()
    preds = _Preds(rng)
    rep = SuiteReport("implication")
    unknown = 0
    seen = set()

    def ask(env, p, q):
        nonlocal unknown
        query = make_query(env, p, q)
        seen.add((env, p, q))
        v = oracle.decide(query)
        if isinstance(v, Unknown):
            unknown += 1
        if isinstance(v, Invalid) and v.model:
            # a counter-model must really refute the query
            model = dict(v.model)
            try:
                if not eval_formula(query.negation(), model):
                    rep.failures.append(f"bogus counter-model for {pretty_query(query)}")
            except KeyError:
                pass
        return v

    def demand(axiom, env, p, q):
        rep.checks += 1
        v = ask(env, p, q)
        if isinstance(v, Invalid):
            rep.failures.append(f"{axiom}: {pretty_query(make_query(env, p, q))} judged Invalid")
        return v

    for _ in range(n):
        env = preds.env()
        p, q, r = preds.pred(env), preds.pred(env), preds.pred(env)
        # reflexivity and conjunction elimination
        demand("reflexivity", env, p, p)
        demand("and-left", env, mk_and(p, q), p)
        demand("and-right", env, mk_and(p, q), q)
        demand("or-intro", env, p, App(App(Prim("or"), p), q))
        # valid pairs are rare among random ones, so some are derived from p
        pairs = [(p, q), (mk_and(p, q), q), (p, App(App(Prim("or"), p), r)), (mk_and(p, r), mk_and(r, p))]
        for hyp, concl in pairs:
            if isinstance(ask(env, hyp, concl), Valid):
                _consequences(demand, preds, rng, env, hyp, concl, r)
        # transitivity through a middle predicate
        if isinstance(ask(env, p, r), Valid) and isinstance(ask(env, r, q), Valid):
            demand("transitivity", env, p, q)
    rep.notes = {"queries": len(seen), "unknown": unknown}
    return rep


def _consequences(demand, preds, rng, env, p, q, r):
    """Axioms that apply once Γ ⊢ p ⇒ q is known to be valid."""
    # weakening: an unused binding changes nothing
    y = preds.supply.fresh("w")
    demand("weakening", env.bind(y, Refn(TInt(), mk_leq(TInt(), int_(0), _V))), p, q)
    # strengthening the hypothesis keeps validity
    demand("strengthening", env, mk_and(r, p), q)
    # conjunction introduction with a trivially implied conjunct
    demand("conjunction intro", env, p, mk_and(q, p))
    # literal substitution for an unrefined integer variable
    lit_var = [b for b in env.term_binds() if b.ty == INT]
    if lit_var:
        x = lit_var[-1].name
        k = int_(rng.randint(-3, 3))
        rest = Env(tuple(b for b in env if b.name != x))
        demand("literal substitution", rest, subFV(x, k, p), subFV(x, k, q))
