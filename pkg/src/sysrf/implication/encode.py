"""Reading refinement predicates as logical formulas.

Boolean connectives become formula connectives and comparisons at Int become
linear atoms. Comparisons at a base-kinded type variable are read over the
integers too: both Bool (false < true) and Int order-embed into Int, so any
implication valid for every integer assignment holds at every instantiation.
Subterms outside the fragment become opaque atoms keyed by their structure.
"""

from __future__ import annotations

from ..semantics import step
from ..syntax import (
    Ann, App, Env, Exists, Expr, FreeVar, Lam, Let, NameSupply, Prim, Refn,
    TApp, is_value, open_expr, open_pred, open_type,
)
from ..sysf import FBool, FEnv, FInt, FTVar, FTypeError, erase, erase_env, f_synth
from .formula import (
    FALSE_F, TRUE_F, Formula, BoolVar, Iff, Lin, LinTerm, Opaque, OpaqueTerm,
    conj, disj, neg,
)

REDUCTION_FUEL = 200


class NotBoolean(Exception):
    code = "NotBoolean"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


def _implies(a: Formula, b: Formula) -> Formula:
    return disj(neg(a), b)


class Encoder:
    def __init__(self, delta: FEnv, fuel: int = REDUCTION_FUEL):
        self.delta = delta
        self.fuel = fuel

    def encode(self, e: Expr) -> Formula:
        """Encode a predicate after confirming it is boolean in the erased environment."""
        try:
            tau = f_synth(self.delta, e)
        except FTypeError as err:
            raise NotBoolean(f"predicate is not well-typed: {err.message}") from None
        if tau != FBool():
            raise NotBoolean(f"predicate has type {tau!r}, not Bool")
        return self.formula(e)

    def _reduce(self, e: Expr) -> Expr | None:
        """Evaluate one step inside a predicate; terms that reduce denote the same value."""
        if self.fuel <= 0:
            return None
        match e:
            case App(Lam(body), arg) if is_value(arg):
                out = open_expr(body, arg)
            case Let(bound, body) if is_value(bound):
                out = open_expr(body, bound)
            case _:
                out = step(e)
        if out is not None:
            self.fuel -= 1
        return out

    def _is_bool_name(self, e: FreeVar) -> bool:
        return self.delta.lookup(e.name) == FBool()

    def formula(self, e: Expr) -> Formula:
        match e:
            case Prim("true"):
                return TRUE_F
            case Prim("false"):
                return FALSE_F
            case FreeVar(name) if self._is_bool_name(e):
                return BoolVar(name)
            case Ann(sub, _):
                return self.formula(sub)
            case App(Prim("not"), a):
                return neg(self.formula(a))
            case App(App(Prim("and"), a), b):
                return conj(self.formula(a), self.formula(b))
            case App(App(Prim("or"), a), b):
                return disj(self.formula(a), self.formula(b))
            case App(App(Prim("iff"), a), b):
                return Iff(self.formula(a), self.formula(b))
            case App(App(Prim("leq_bool"), a), b):
                return _implies(self.formula(a), self.formula(b))
            case App(App(Prim("leq_int"), a), b):
                return Lin("<=", self.term(a), self.term(b))
            case App(App(Prim("eq_int"), a), b):
                return Lin("=", self.term(a), self.term(b))
            case App(Prim("leqN", m), a):
                return Lin("<=", LinTerm.lit(m), self.term(a))
            case App(Prim("eqN", m), a):
                return Lin("=", LinTerm.lit(m), self.term(a))
            case App(App(TApp(Prim(op), ty), a), b) if op in ("leq", "eq") and isinstance(ty, Refn):
                return self._compare(op, erase(ty), a, b, e)
        out = self._reduce(e)
        if out is not None:
            return self.formula(out)
        return Opaque(e)

    def _compare(self, op: str, tau, a: Expr, b: Expr, whole: Expr) -> Formula:
        if tau == FBool():
            fa, fb = self.formula(a), self.formula(b)
            return _implies(fa, fb) if op == "leq" else Iff(fa, fb)
        if isinstance(tau, (FInt, FTVar)):
            return Lin("<=" if op == "leq" else "=", self.term(a), self.term(b))
        return Opaque(whole)

    def term(self, e: Expr) -> LinTerm:
        match e:
            case Prim("int", n):
                return LinTerm.lit(n)
            case FreeVar(name):
                return LinTerm.var(name)
            case Ann(sub, _):
                return self.term(sub)
        out = self._reduce(e)
        if out is not None:
            return self.term(out)
        return LinTerm.var(OpaqueTerm(e))


def encode(e: Expr, delta: FEnv | Env = FEnv()) -> Formula:
    if isinstance(delta, Env):
        delta = erase_env(delta)
    return Encoder(delta).encode(e)


def env_assumptions(env: Env, supply: NameSupply | None = None) -> tuple[list[Formula], FEnv]:
    """Facts contributed by the refinements in an environment, plus the erased
    environment extended with the names chosen for opened existentials."""
    if supply is None:
        supply = NameSupply()
        supply.reserve_in(env)
    enc = Encoder(erase_env(env))
    out: list[Formula] = []

    def assume(y, t):
        match t:
            case Refn(_, pred, _):
                if pred != Prim("true"):
                    out.append(enc.encode(open_pred(pred, y)))
            case Exists(bound, body, hint):
                z = supply.fresh(hint)
                enc.delta = enc.delta.bind(z, erase(bound))
                assume(z, bound)
                assume(y, open_type(body, z))

    for b in env.term_binds():
        assume(b.name, b.ty)
    return out, enc.delta

