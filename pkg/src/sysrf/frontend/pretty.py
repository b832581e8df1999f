"""Printing core terms and types back in surface syntax.

Bound variables get their binder hints, renamed only when a hint is already
in scope. Free names print with their identity (`x$3`) so that output parses
back to the same tree.
"""

from __future__ import annotations

import re

from ..syntax import (
    TRUE, Ann, App, BoundVar, Env, Exists, Expr, FreeVar, Func, Lam, Let, Poly,
    Prim, RType, Refn, TApp, TBool, TermBind, TInt, TLam, TVarBound, TVarFree,
    TyBind, Visitor,
)
from .parser import KEYWORDS

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_RESERVED = KEYWORDS | {"Int", "Bool"}

# binding strength, loosest first
BINDER, IFF, OR, AND, NOT, CMP, APP, ATOM = range(8)


def _pick(hint: str, taken, default: str) -> str:
    base = hint if hint and _IDENT.fullmatch(hint) and hint not in _RESERVED else default
    name, k = base, 0
    while name in taken:
        k += 1
        name = f"{base}{k}"
    return name


def show_name(n) -> str:
    hint = n.hint if n.hint and _IDENT.fullmatch(n.hint) else "n"
    return f"{hint}${n.id}"


class _Mentions(Visitor):
    def __init__(self):
        self.hit = False

    def bvar(self, e, td, yd):
        if e.index == td:
            self.hit = True


def mentions_outer(t: RType) -> bool:
    """Does t refer to the term binder immediately enclosing it?"""
    v = _Mentions()
    v.ty(t)
    return v.hit


def _paren(text: str, level: int, need: int) -> str:
    return f"({text})" if level < need else text


class Printer:
    def __init__(self, terms: tuple = (), types: tuple = ()):
        self.terms = list(terms)  # innermost last
        self.types = list(types)

    def _bound(self, hint: str, default: str = "x") -> str:
        return _pick(hint, set(self.terms), default)

    def _bound_ty(self, hint: str) -> str:
        return _pick(hint, set(self.types) | {"B"}, "a")

    def _var(self, i: int) -> str:
        if i >= len(self.terms):
            return f"?{i}"
        return self.terms[len(self.terms) - 1 - i]

    # ------------------------------------------------------------ types

    def base(self, b) -> str:
        match b:
            case TInt():
                return "Int"
            case TBool():
                return "Bool"
            case TVarBound(i):
                return self.types[len(self.types) - 1 - i] if i < len(self.types) else f"?{i}"
            case TVarFree(name):
                return show_name(name)
        return repr(b)

    def type(self, t: RType, need: int = 0) -> str:
        """need=1 asks for a form that can stand before an arrow."""
        match t:
            case Refn(b, pred, hint):
                if pred == TRUE:
                    return self.base(b)
                v = self._bound(hint, "v")
                self.terms.append(v)
                p = self.expr(pred)
                self.terms.pop()
                return f"{self.base(b)}{{{v}: {p}}}"
            case Func(arg, res, hint):
                a = self.type(arg, 1)
                x = self._bound(hint)
                self.terms.append(x)
                r = self.type(res)
                self.terms.pop()
                text = f"{x}:{a} -> {r}" if mentions_outer(res) else f"{a} -> {r}"
                return f"({text})" if need else text
            case Exists(bound, body, hint):
                a = self.type(bound, 1)
                x = self._bound(hint)
                self.terms.append(x)
                r = self.type(body)
                self.terms.pop()
                text = f"exists {x}:{a}. {r}"
                return f"({text})" if need else text
            case Poly(kind, body, hint):
                a = self._bound_ty(hint)
                self.types.append(a)
                b = self.type(body)
                self.types.pop()
                text = f"forall {a}:{kind.value}. {b}"
                return f"({text})" if need else text
        raise TypeError(f"not a type: {t!r}")

    # ------------------------------------------------------------ expressions

    def expr(self, e: Expr, need: int = BINDER) -> str:
        text, level = self._expr(e)
        return _paren(text, level, need)

    def _infix(self, op: str, level: int, a: Expr, b: Expr):
        return f"{self.expr(a, level + 1)} {op} {self.expr(b, level)}", level

    def _expr(self, e: Expr) -> tuple[str, int]:
        match e:
            case App(App(Prim("and"), a), b):
                return self._infix("&&", AND, a, b)
            case App(App(Prim("or"), a), b):
                return self._infix("||", OR, a, b)
            case App(App(Prim("iff"), a), b):
                return self._infix("<=>", IFF, a, b)
            case App(Prim("not"), a):
                return f"not {self.expr(a, APP)}", NOT
            case App(App(TApp(Prim(("leq" | "eq") as op), Refn(base, pred, _)), a), b) if pred == TRUE:
                if not isinstance(base, TVarBound) or base.index < len(self.types):
                    sym = "<=" if op == "leq" else "=="
                    return f"{self.expr(a, APP)} {sym} {self.expr(b, APP)}", CMP
        match e:
            case Prim(tag, arg):
                return _prim(tag, arg), ATOM
            case FreeVar(name):
                return show_name(name), ATOM
            case BoundVar(i):
                return self._var(i), ATOM
            case Lam(body, hint):
                x = self._bound(hint)
                self.terms.append(x)
                b = self.expr(body)
                self.terms.pop()
                return f"\\{x} -> {b}", BINDER
            case TLam(kind, body, hint):
                a = self._bound_ty(hint)
                self.types.append(a)
                b = self.expr(body)
                self.types.pop()
                return f"/\\{a}:{kind.value} -> {b}", BINDER
            case Let(bound, body, hint):
                rhs = self.expr(bound)
                x = self._bound(hint)
                self.terms.append(x)
                b = self.expr(body)
                self.terms.pop()
                return f"let {x} = {rhs} in {b}", BINDER
            case App(fn, arg):
                return f"{self.expr(fn, APP)} {self.expr(arg, ATOM)}", APP
            case TApp(fn, ty):
                return f"{self.expr(fn, APP)} [{self.type(ty)}]", APP
            case Ann(sub, ty):
                return f"({self.expr(sub)} : {self.type(ty)})", ATOM
        raise TypeError(f"not an expression: {e!r}")


def _prim(tag: str, arg) -> str:
    match tag:
        case "true" | "false":
            return tag
        case "int":
            return str(arg)
        case "leqN":
            return f"%leq({arg})"
        case "eqN":
            return f"%eq({arg})"
    return f"%{tag}"


def pretty(x: Expr | RType) -> str:
    if isinstance(x, (Refn, Func, Exists, Poly)):
        return Printer().type(x)
    return Printer().expr(x)


def pretty_env(env: Env) -> str:
    parts = []
    for b in env:
        if isinstance(b, TermBind):
            parts.append(f"{show_name(b.name)}:{pretty(b.ty)}")
        elif isinstance(b, TyBind):
            parts.append(f"{show_name(b.name)}:{b.kind.value}")
    return ", ".join(parts)


def pretty_query(query) -> str:
    env = pretty_env(query.env)
    head = f"{env} |- " if env else "|- "
    return f"{head}{pretty(query.p)} ==> {pretty(query.q)}"
