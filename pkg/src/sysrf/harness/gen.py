"""Derivation-directed generation of well-typed programs.

The generator follows the typing rules itself and asks the implication oracle
for the side conditions (does this literal satisfy that refinement? does this
variable's selfified type fit?). The checker under test is not consulted, so
running the checker over the output is a real cross-check.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..implication import BuiltinOracle, Oracle, Valid, make_query
from ..syntax import (
    BOOL, FALSE, INT, TRUE, Ann, App, BaseTy, BoundVar, Env, Expr, FreeVar,
    Func, Kind, Lam, Let, NameSupply, Poly, Prim, RType, Refn, TApp,
    TBool, TermBind, TInt, TLam, TVarBound, TVarFree, TyBind, Walker, bool_,
    close_expr, close_tyvar_expr, int_, mk_and, mk_eq, mk_leq, mk_not,
    open_pred, open_tyvar, open_type,
)

V, X = BoundVar(0), BoundVar(1)

# forall a:B. x:a -> a{v: v == x}
POLY_ID = Poly(Kind.BASE, Func(Refn(TVarBound(0)), Refn(TVarBound(0), mk_eq(TVarBound(0), V, X)), "x"), "a")
POLY_ID_TERM = Ann(TLam(Kind.BASE, Lam(BoundVar(0), "x"), "a"), POLY_ID)


class GiveUp(Exception):
    """The size budget cannot realize the goal."""


class _NoRule(Exception):
    pass


@dataclass(frozen=True)
class GenConfig:
    seed: int = 42
    terms: int = 500
    size: int = 7
    max_literal: int = 4
    fuel: int = 10_000
    # relative frequency of each rule at refined base goals
    weights: tuple = (
        ("literal", 4), ("variable", 4), ("prim", 4), ("let", 2),
        ("beta", 2), ("poly", 1), ("higher", 1),
    )
    perturb: bool = True


def singleton(base: BaseTy, value: Expr) -> RType:
    return Refn(base, mk_eq(base, V, value))


class Generator:
    def __init__(self, cfg: GenConfig, oracle: Oracle | None = None):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.oracle = oracle or BuiltinOracle()
        self.supply = NameSupply()
        self.give_ups = 0

    # ------------------------------------------------------------ goal types

    def _lit(self) -> int:
        m = self.cfg.max_literal
        return self.rng.randint(-m, m)

    def int_goal(self) -> RType:
        n = self._lit()
        match self.rng.randrange(6):
            case 0:
                return INT
            case 1:
                return singleton(TInt(), int_(n))
            case 2:
                return Refn(TInt(), mk_leq(TInt(), int_(n), V))
            case 3:
                return Refn(TInt(), mk_leq(TInt(), V, int_(n)))
            case 4:
                return Refn(TInt(), mk_not(mk_eq(TInt(), V, int_(n))))
        m = n + self.rng.randint(0, 3)
        return Refn(TInt(), mk_and(mk_leq(TInt(), int_(n), V), mk_leq(TInt(), V, int_(m))))

    def bool_goal(self) -> RType:
        match self.rng.randrange(4):
            case 0:
                return BOOL
            case 1:
                return Refn(TBool(), V)
            case 2:
                return Refn(TBool(), mk_not(V))
        return singleton(TBool(), bool_(self.rng.random() < 0.5))

    def base_goal(self) -> RType:
        return self.int_goal() if self.rng.random() < 0.6 else self.bool_goal()

    def func_goal(self) -> RType:
        """A function type whose result may mention the argument."""
        arg = self.int_goal() if self.rng.random() < 0.7 else self.bool_goal()
        n = self._lit()
        if isinstance(arg.base, TInt):
            res = self.rng.choice([
                singleton(TInt(), X),
                Refn(TInt(), mk_leq(TInt(), X, V)),
                Refn(TBool(), mk_eq(TBool(), V, mk_leq(TInt(), X, int_(n)))),
                self.base_goal(),
            ])
        else:
            res = self.rng.choice([
                singleton(TBool(), X),
                Refn(TBool(), mk_eq(TBool(), V, mk_not(X))),
                self.base_goal(),
            ])
        return Func(arg, res, "x")

    def poly_goal(self) -> RType:
        a = Refn(TVarBound(0))
        match self.rng.randrange(3):
            case 0:
                return POLY_ID
            case 1:
                return Poly(Kind.BASE, Func(a, Func(a, BOOL, "y"), "x"), "a")
        return Poly(Kind.STAR, Func(a, a, "x"), "a")

    def goal(self) -> RType:
        r = self.rng.random()
        if r < 0.7:
            return self.base_goal()
        if r < 0.9:
            return self.func_goal()
        return self.poly_goal()

    # ------------------------------------------------------------ side conditions

    def fits(self, env: Env, base: BaseTy, have: Expr, want: Expr) -> bool:
        """Γ, v:base ⊢ have ⇒ want, both predicates over index 0."""
        if want == TRUE or have == want:
            return True
        v = self.supply.fresh("v")
        q = make_query(env.bind(v, Refn(base)), open_pred(have, v), open_pred(want, v))
        return isinstance(self.oracle.decide(q), Valid)

    # ------------------------------------------------------------ terms

    def program(self) -> tuple[RType, Expr]:
        """A closed goal type and a closed term generated to check against it."""
        for _ in range(50):
            goal = self.goal()
            try:
                e = self.gen(Env(), goal, self.cfg.size)
            except GiveUp:
                self.give_ups += 1
                continue
            if isinstance(goal, (Func, Poly)) and self.rng.random() < 0.5:
                e = Ann(e, goal)
            return goal, e
        raise GiveUp("no goal could be realized")

    def gen(self, env: Env, goal: RType, size: int) -> Expr:
        self.supply.reserve_in(env, goal)
        match goal:
            case Func(arg, res, hint):
                x = self.supply.fresh(hint)
                body = self.gen(env.bind(x, arg), open_type(res, x), size - 1)
                return Lam(close_expr(body, x), hint)
            case Poly(kind, body, hint):
                a = self.supply.fresh(hint)
                b = self.gen(env.bind_ty(a, kind), open_tyvar(body, a), size - 1)
                return TLam(kind, close_tyvar_expr(b, a), hint)
            case Refn():
                return self._base(env, goal, size)
        raise GiveUp(f"cannot generate at {goal!r}")

    def _rules(self, size: int) -> list[str]:
        pool = [(r, w) for r, w in self.cfg.weights if size > 1 or r in ("literal", "variable")]
        out = []
        while pool:
            total = sum(w for _, w in pool)
            pick = self.rng.uniform(0, total)
            for i, (r, w) in enumerate(pool):
                pick -= w
                if pick <= 0 or i == len(pool) - 1:
                    out.append(r)
                    pool.pop(i)
                    break
        return out

    def _base(self, env: Env, goal: Refn, size: int) -> Expr:
        for rule in self._rules(size):
            try:
                return getattr(self, f"_rule_{rule}")(env, goal, size)
            except (_NoRule, GiveUp):
                continue
        raise GiveUp("no rule applies")

    def _rule_literal(self, env, goal, size):
        match goal.base:
            case TInt():
                m = self.cfg.max_literal
                pool = [int_(n) for n in range(-m, m + 1)]
            case TBool():
                pool = [TRUE, FALSE]
            case _:
                raise _NoRule
        self.rng.shuffle(pool)
        for lit in pool:
            if self.fits(env, goal.base, mk_eq(goal.base, V, lit), goal.pred):
                return lit
        raise _NoRule

    def _rule_variable(self, env, goal, size):
        binds = [b for b in env if isinstance(b, TermBind) and isinstance(b.ty, Refn) and b.ty.base == goal.base]
        self.rng.shuffle(binds)
        for b in binds:
            own = mk_eq(goal.base, V, FreeVar(b.name))
            have = own if b.ty.pred == TRUE else mk_and(b.ty.pred, own)
            if self.fits(env, goal.base, have, goal.pred):
                return FreeVar(b.name)
        raise _NoRule

    def _maybe_ann(self, e: Expr, t: RType) -> Expr:
        return Ann(e, t) if self.rng.random() < 0.4 else e

    def _rule_prim(self, env, goal, size):
        if not isinstance(goal.base, TBool):
            raise _NoRule
        if self.rng.random() < 0.3 and self.fits(env, TBool(), TRUE, goal.pred):
            return self._free_prim(env, size)
        op = self.rng.choice(["and", "or", "iff", "not", "leq", "eq", "leq_int", "eq_int", "leq_bool", "leqN", "eqN"])
        ints = op in ("leq_int", "eq_int", "leqN", "eqN") or (op in ("leq", "eq") and self.rng.random() < 0.6)
        base = TInt() if ints else TBool()
        m = self.cfg.max_literal
        vals = [self.rng.randint(-m, m) if ints else self.rng.random() < 0.5 for _ in range(2)]
        a, b = vals
        result = {
            "and": lambda: a and b, "or": lambda: a or b, "iff": lambda: a == b, "not": lambda: not a,
            "leq": lambda: a <= b, "eq": lambda: a == b, "leq_int": lambda: a <= b,
            "eq_int": lambda: a == b, "leq_bool": lambda: (not a) or b,
            "leqN": lambda: a <= b, "eqN": lambda: a == b,
        }[op]()
        if not self.fits(env, TBool(), mk_eq(TBool(), V, bool_(result)), goal.pred):
            raise _NoRule
        lit = int_ if ints else bool_
        half = max(1, (size - 1) // 2)

        def arg(x):
            t = singleton(base, lit(x))
            return self._maybe_ann(self.gen(env, t, half), t)

        match op:
            case "not":
                return App(Prim("not"), arg(a))
            case "leqN" | "eqN":
                return App(Prim(op, a), arg(b))
            case "leq" | "eq":
                return App(App(TApp(Prim(op), Refn(base)), arg(a)), arg(b))
        return App(App(Prim(op), arg(a)), arg(b))

    def _free_prim(self, env, size):
        """A comparison whose result is unconstrained, possibly at a type variable."""
        bases = [TInt(), TBool()] + [
            TVarFree(b.name) for b in env if isinstance(b, TyBind) and b.kind is Kind.BASE
        ]
        base = self.rng.choice(bases)
        half = max(1, (size - 1) // 2)
        a, b = self.gen(env, Refn(base), half), self.gen(env, Refn(base), half)
        return App(App(TApp(Prim(self.rng.choice(["leq", "eq"])), Refn(base)), a), b)

    def _rule_let(self, env, goal, size):
        tx = self.base_goal()
        bound = self.gen(env, tx, max(1, size // 2))
        if isinstance(bound, Prim):
            tb = singleton(tx.base, bound)
        else:
            bound, tb = Ann(bound, tx), tx
        x = self.supply.fresh("x")
        body = self.gen(env.bind(x, tb), goal, size - 1)
        return Let(bound, close_expr(body, x), "x")

    def _rule_beta(self, env, goal, size):
        tx = self.base_goal()
        arg = self.gen(env, tx, max(1, size // 2))
        x = self.supply.fresh("x")
        body = self.gen(env.bind(x, tx), goal, size - 1)
        return App(Ann(Lam(close_expr(body, x), "x"), Func(tx, goal, "x")), arg)

    def _rule_poly(self, env, goal, size):
        if isinstance(goal.base, TVarFree) and env.kind_of(goal.base.name) is not Kind.BASE:
            raise _NoRule
        inst = goal if self.rng.random() < 0.5 else Refn(goal.base)
        arg = self.gen(env, goal, size - 1)
        return App(TApp(POLY_ID_TERM, inst), arg)

    def _rule_higher(self, env, goal, size):
        tx = self.base_goal()
        ft = Func(tx, goal, "y")
        fn = self.gen(env, ft, max(1, size // 2))
        arg = self.gen(env, tx, max(1, size // 3))
        f = self.supply.fresh("f")
        body = close_expr(App(FreeVar(f), arg), f)
        return App(Ann(Lam(body, "f"), Func(ft, goal, "f")), Ann(fn, ft))

    # ------------------------------------------------------------ negative controls

    def perturb(self, e: Expr) -> Expr:
        """Replace one literal with a different one of the same type."""
        count = _Literals()
        count.expr(e)
        if not count.n:
            return e
        target = self.rng.randrange(count.n)
        m = self.cfg.max_literal
        return _Literals(target, lambda p: _other(p, self.rng, m)).expr(e)


def _other(p: Prim, rng: random.Random, m: int) -> Prim:
    if p.tag == "int":
        choices = [n for n in range(-m, m + 1) if n != p.arg]
        return int_(rng.choice(choices))
    return FALSE if p == TRUE else TRUE


class _Literals(Walker):
    """Counts literals, or rewrites the one at position `target`."""

    def __init__(self, target: int = -1, rewrite=None):
        self.n = 0
        self.target, self.rewrite = target, rewrite

    def expr(self, e, td=0, yd=0):
        if isinstance(e, Prim) and e.tag in ("int", "true", "false"):
            i, self.n = self.n, self.n + 1
            return self.rewrite(e) if i == self.target else e
        return super().expr(e, td, yd)


def random_term(rng: random.Random, depth: int = 4, scope: int = 0, tscope: int = 0) -> Expr:
    """An arbitrary locally closed term, typed or not."""
    leaves = [lambda: int_(rng.randint(-3, 3)), lambda: bool_(rng.random() < 0.5),
              lambda: Prim(rng.choice(["and", "or", "not", "iff", "leq", "eq", "leq_int", "eq_int", "leq_bool"])),
              lambda: Prim(rng.choice(["leqN", "eqN"]), rng.randint(-3, 3))]
    if scope:
        leaves.append(lambda: BoundVar(rng.randrange(scope)))
    if depth <= 0 or rng.random() < 0.25:
        return rng.choice(leaves)()

    def sub(s=scope, t=tscope):
        return random_term(rng, depth - 1, s, t)

    def ty():
        base = rng.choice([TInt(), TBool()] + ([TVarBound(rng.randrange(tscope))] if tscope else []))
        return Refn(base)

    match rng.randrange(7):
        case 0:
            return Lam(sub(scope + 1))
        case 1:
            return TLam(rng.choice([Kind.BASE, Kind.STAR]), sub(scope, tscope + 1))
        case 2 | 3:
            return App(sub(), sub())
        case 4:
            return TApp(sub(), ty())
        case 5:
            return Let(sub(), sub(scope + 1))
    return Ann(sub(), ty())

