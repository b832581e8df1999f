"""Call-by-value small-step evaluation with primitive reduction tables."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .primitives import delta, delta_t
from .substitution import open_tyvar_with_expr
from .syntax import Ann, App, Expr, Lam, Let, Prim, TApp, TLam, is_value, open_expr
from .sysf import erase

DEFAULT_FUEL = 100_000


@dataclass(frozen=True)
class Value:
    expr: Expr
    steps: int = 0


@dataclass(frozen=True)
class Stuck:
    expr: Expr
    reason: str
    steps: int = 0


@dataclass(frozen=True)
class OutOfFuel:
    expr: Expr
    steps: int


EvalResult = Union[Value, Stuck, OutOfFuel]


def step_rule(e: Expr) -> tuple[str, Expr] | None:
    """One reduction step and the name of the rule that fired."""
    match e:
        case App(fn, arg):
            if not is_value(fn):
                r = step_rule(fn)
                return None if r is None else ("E-App", App(r[1], arg))
            if not is_value(arg):
                r = step_rule(arg)
                return None if r is None else ("E-AppV", App(fn, r[1]))
            if isinstance(fn, Lam):
                return "E-AppAbs", open_expr(fn.body, arg)
            if isinstance(fn, Prim):
                out = delta(fn, arg)
                return None if out is None else ("E-Prim", out)
            return None
        case TApp(fn, ty):
            if not is_value(fn):
                r = step_rule(fn)
                return None if r is None else ("E-TApp", TApp(r[1], ty))
            if isinstance(fn, TLam):
                return "E-TAppAbs", open_tyvar_with_expr(fn.body, ty)
            if isinstance(fn, Prim):
                out = delta_t(fn, erase(ty))
                return None if out is None else ("E-TPrim", out)
            return None
        case Let(bound, body, _):
            if not is_value(bound):
                r = step_rule(bound)
                return None if r is None else ("E-Let", Let(r[1], body, e.hint))
            return "E-LetV", open_expr(body, bound)
        case Ann(sub, ty):
            if not is_value(sub):
                r = step_rule(sub)
                return None if r is None else ("E-Ann", Ann(r[1], ty))
            return "E-AnnV", sub
    return None


def step(e: Expr) -> Expr | None:
    r = step_rule(e)
    return None if r is None else r[1]


def matching_rules(e: Expr) -> list[str]:
    """Every rule whose conclusion and premises match `e`, checked independently of `step`."""
    hits = []
    steps = lambda x: step(x) is not None  # noqa: E731
    if isinstance(e, App):
        f, a = e.fn, e.arg
        if isinstance(f, Prim) and is_value(a) and delta(f, a) is not None:
            hits.append("E-Prim")
        if steps(f):
            hits.append("E-App")
        if is_value(f) and steps(a):
            hits.append("E-AppV")
        if isinstance(f, Lam) and is_value(a):
            hits.append("E-AppAbs")
    elif isinstance(e, TApp):
        f = e.fn
        if isinstance(f, Prim) and delta_t(f, erase(e.ty)) is not None:
            hits.append("E-TPrim")
        if steps(f):
            hits.append("E-TApp")
        if isinstance(f, TLam):
            hits.append("E-TAppAbs")
    elif isinstance(e, Let):
        if steps(e.bound):
            hits.append("E-Let")
        if is_value(e.bound):
            hits.append("E-LetV")
    elif isinstance(e, Ann):
        if steps(e.sub):
            hits.append("E-Ann")
        if is_value(e.sub):
            hits.append("E-AnnV")
    return hits


def evaluate(e: Expr, fuel: int = DEFAULT_FUEL) -> EvalResult:
    steps = 0
    while True:
        if is_value(e):
            return Value(e, steps)
        if steps >= fuel:
            return OutOfFuel(e, steps)
        nxt = step(e)
        if nxt is None:
            return Stuck(e, _stuck_reason(e), steps)
        e = nxt
        steps += 1


def trace(e: Expr, fuel: int = DEFAULT_FUEL) -> list[Expr]:
    """The reduction sequence starting at `e` (inclusive), truncated at `fuel` steps."""
    out = [e]
    while len(out) <= fuel:
        nxt = step(out[-1])
        if nxt is None:
            break
        out.append(nxt)
    return out


def _stuck_reason(e: Expr) -> str:
    match e:
        case App(fn, arg) if is_value(fn) and is_value(arg):
            if isinstance(fn, Prim) and fn.tag not in ("true", "false", "int"):
                return f"primitive {fn.tag} undefined on {arg!r}"
            return "application of a non-function value"
        case App(fn, arg):
            return _stuck_reason(fn if not is_value(fn) else arg)
        case TApp(fn, _) if is_value(fn):
            return "type application of a non-polymorphic value"
        case TApp(fn, _) | Let(fn, _, _) | Ann(fn, _):
            return _stuck_reason(fn)
    return "no rule applies"
