"""Built-in constants: their refined types and their reduction tables."""

from __future__ import annotations

from .syntax import (
    BOOL, INT, FALSE, TRUE, App, BoundVar, Expr, Func, Kind, Lam, Poly, Prim,
    RType, Refn, TBool, TInt, TVarBound, bool_, mk_eq, mk_leq, mk_not,
)

_V, _Y, _X = BoundVar(0), BoundVar(1), BoundVar(2)


def _result(body: Expr) -> RType:
    """Bool{v: v = body}."""
    return Refn(TBool(), mk_eq(TBool(), _V, body))


def _binary(dom: RType, op) -> RType:
    # inside the result refinement: v = 0, y = 1, x = 2
    return Func(dom, Func(dom, _result(op(_X, _Y)), "y"), "x")


def _app2(tag: str):
    return lambda a, b: App(App(Prim(tag), a), b)


_ALPHA = Refn(TVarBound(0))


def prim_type(c: Prim) -> RType:
    """ty(c)."""
    match c.tag:
        case "true" | "false":
            return Refn(TBool(), mk_eq(TBool(), _V, c))
        case "int":
            return Refn(TInt(), mk_eq(TInt(), _V, c))
        case "and" | "or" | "iff":
            return _binary(BOOL, _app2(c.tag))
        case "not":
            return Func(BOOL, _result(mk_not(BoundVar(1))), "x")
        case "leq":
            return Poly(Kind.BASE, _binary(_ALPHA, lambda a, b: mk_leq(TVarBound(0), a, b)))
        case "eq":
            return Poly(Kind.BASE, _binary(_ALPHA, lambda a, b: mk_eq(TVarBound(0), a, b)))
        case "leq_int":
            return _binary(INT, lambda a, b: mk_leq(TInt(), a, b))
        case "eq_int":
            return _binary(INT, lambda a, b: mk_eq(TInt(), a, b))
        case "leq_bool":
            return _binary(BOOL, lambda a, b: mk_leq(TBool(), a, b))
        case "leqN":
            return Func(INT, _result(mk_leq(TInt(), Prim("int", c.arg), BoundVar(1))), "y")
        case "eqN":
            return Func(INT, _result(mk_eq(TInt(), Prim("int", c.arg), BoundVar(1))), "y")
    raise ValueError(f"no type for {c!r}")


_ID = Lam(BoundVar(0))


def delta(c: Prim, v: Expr) -> Expr | None:
    """Result of applying a primitive to a value, or None off the table."""
    match c.tag, v:
        case "and", Prim("true"):
            return _ID
        case "and", Prim("false"):
            return Lam(FALSE)
        case "or", Prim("true"):
            return Lam(TRUE)
        case "or", Prim("false"):
            return _ID
        case "not", Prim("true"):
            return FALSE
        case "not", Prim("false"):
            return TRUE
        case "iff", Prim("true"):
            return _ID
        case "iff", Prim("false"):
            return Lam(mk_not(BoundVar(0)))
        case ("leq" | "leq_int"), Prim("int", m):
            return Prim("leqN", m)
        case ("eq" | "eq_int"), Prim("int", m):
            return Prim("eqN", m)
        case "leqN", Prim("int", n):
            return bool_(c.arg <= n)
        case "eqN", Prim("int", n):
            return bool_(c.arg == n)
        case "leq_bool", Prim("true"):
            return _ID
        case "leq_bool", Prim("false"):
            return Lam(TRUE)
    return None


def delta_t(c: Prim, tau) -> Expr | None:
    """Result of instantiating a polymorphic primitive at an erased type."""
    from .sysf import FBool, FInt

    match c.tag, tau:
        case "eq", FBool():
            return Prim("iff")
        case "eq", FInt():
            return Prim("eq_int")
        case "leq", FBool():
            return Prim("leq_bool")
        case "leq", FInt():
            return Prim("leq_int")
    return None


ALL_OPERATORS = [
    Prim(t) for t in ("and", "or", "not", "iff", "leq", "eq", "leq_int", "eq_int", "leq_bool")
]


def sample_primitives(lo: int = -3, hi: int = 3) -> list[Prim]:
    """Every operator plus literal and partially applied constants over [lo, hi]."""
    out = [TRUE, FALSE] + [Prim("int", n) for n in range(lo, hi + 1)]
    out += ALL_OPERATORS
    out += [Prim("leqN", m) for m in range(lo, hi + 1)]
    out += [Prim("eqN", m) for m in range(lo, hi + 1)]
    return out
