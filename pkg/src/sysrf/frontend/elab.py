"""Elaboration of surface syntax into the locally nameless core.

Besides resolving names to indices, elaboration infers the unrefined type of
comparison operands so that `a <= b` can become `leq [T] a b` with the right
base type T. Inference is plain first-order unification over System F types
with metavariables; refinements play no part in it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..diagnostics import Diagnostic, ParseError, Span
from ..primitives import prim_type
from ..syntax import (
    FALSE, TRUE, Ann, App, Env, Exists, Expr, FreeVar, Func, Lam, Let,
    Name, Poly, Prim, RType, Refn, TApp, TBool, TInt, TLam, TVarBound,
    TVarFree, TermBind, TyBind, Walker, BoundVar, close_expr, int_,
)
from .surface import (
    Definition, Program, SAnn, SApp, SBin, SBool, SExpr, SFree, SInt, SLam,
    SLet, SNot, SPrim, STBase, STExists, STFunc, STLam, STPoly, STRefn, SType,
    STyApp, SVar,
)


class RejectedExistentialAnnotation(ParseError):
    def __init__(self, span: Span | None = None):
        super().__init__("existential types may not be written in annotations or signatures", span)
        self.code = "RejectedExistentialAnnotation"


# ---------------------------------------------------------------- inference types
#
# "Int", "Bool", ("var", uid) for a bound type variable, ("free", Name),
# ("fun", a, r), ("poly", uid, kind, body), or a Meta.

_uids = itertools.count(1)


@dataclass(eq=False)
class Meta:
    ref: object = None


def prune(t):
    while isinstance(t, Meta) and t.ref is not None:
        t = t.ref
    return t


def _occurs(m: Meta, t) -> bool:
    t = prune(t)
    if t is m:
        return True
    if isinstance(t, tuple) and t[0] == "fun":
        return _occurs(m, t[1]) or _occurs(m, t[2])
    if isinstance(t, tuple) and t[0] == "poly":
        return _occurs(m, t[3])
    return False


def _rename(t, uid_from: int, repl):
    t = prune(t)
    if isinstance(t, tuple):
        match t[0]:
            case "var":
                return repl if t[1] == uid_from else t
            case "fun":
                return ("fun", _rename(t[1], uid_from, repl), _rename(t[2], uid_from, repl))
            case "poly":
                return ("poly", t[1], t[2], _rename(t[3], uid_from, repl))
    return t


def show_itype(t) -> str:
    t = prune(t)
    if isinstance(t, Meta):
        return "?"
    if isinstance(t, str):
        return t
    match t[0]:
        case "var":
            return f"'{t[1]}"
        case "free":
            return repr(t[1])
        case "fun":
            return f"({show_itype(t[1])} -> {show_itype(t[2])})"
        case "poly":
            return f"(forall '{t[1]}:{t[2].value}. {show_itype(t[3])})"
    return repr(t)


def itype_of(t: RType, yscope: tuple = ()):
    """The unrefined shape of a core type; yscope lists uids of enclosing type binders."""
    match t:
        case Refn(TInt(), _, _):
            return "Int"
        case Refn(TBool(), _, _):
            return "Bool"
        case Refn(TVarBound(i), _, _):
            return ("var", yscope[len(yscope) - 1 - i])
        case Refn(TVarFree(name), _, _):
            return ("free", name)
        case Func(a, r, _):
            return ("fun", itype_of(a, yscope), itype_of(r, yscope))
        case Exists(_, body, _):
            return itype_of(body, yscope)
        case Poly(k, body, _):
            uid = next(_uids)
            return ("poly", uid, k, itype_of(body, yscope + (uid,)))
    raise TypeError(f"not a type: {t!r}")


@dataclass(frozen=True)
class _Pending:
    """Placeholder base type of a comparison, fixed once inference is complete."""

    itype: object = field(compare=False)
    yscope: tuple = field(compare=False)
    span: Span | None = field(compare=False, default=None)


class _Resolve(Walker):
    def __init__(self, fail):
        self.fail = fail

    def refn(self, t, pred, td, yd):
        if isinstance(t.base, _Pending):
            return Refn(self._base(t.base), pred, t.hint)
        return super().refn(t, pred, td, yd)

    def _base(self, p: _Pending):
        it = prune(p.itype)
        if it == "Int":
            return TInt()
        if it == "Bool":
            return TBool()
        if isinstance(it, tuple) and it[0] == "var":
            return TVarBound(len(p.yscope) - 1 - p.yscope.index(it[1]))
        if isinstance(it, tuple) and it[0] == "free":
            return TVarFree(it[1])
        if isinstance(it, Meta):
            raise self.fail("AmbiguousComparison", "cannot tell what type is being compared; add an annotation", p.span)
        raise self.fail("ComparisonNotBase", f"comparison at non-base type {show_itype(it)}", p.span)


# ---------------------------------------------------------------- elaborator


@dataclass
class Scope:
    terms: tuple = ()  # (surface name, itype), innermost last
    types: tuple = ()  # (surface name, uid), innermost last

    def bind(self, name: str, it) -> Scope:
        return Scope(self.terms + ((name, it),), self.types)

    def bind_ty(self, name: str, uid: int) -> Scope:
        return Scope(self.terms, self.types + ((name, uid),))


class Elaborator:
    def __init__(self, env: Env | None = None, allow_exists: bool = True):
        self.globals: dict[str, tuple[Name, object]] = {}
        self.free_types: dict[Name, object] = {}
        self.type_globals: dict[str, Name] = {}
        self.allow_exists = allow_exists
        if env is not None:
            for b in env:
                if isinstance(b, TermBind):
                    self.add_global(b.name, b.ty)
                elif isinstance(b, TyBind):
                    self.type_globals[b.name.hint] = b.name

    def add_global(self, name: Name, t: RType) -> None:
        it = itype_of(t)
        self.globals[name.hint] = (name, it)
        self.free_types[name] = it

    def _fail(self, code: str, message: str, span: Span | None) -> Diagnostic:
        return Diagnostic(code, message, rule="elaboration", span=span)

    def finish(self, x):
        r = _Resolve(self._fail)
        if isinstance(x, (Refn, Func, Exists, Poly)):
            return r.ty(x)
        return r.expr(x)

    def unify(self, a, b, span: Span | None) -> None:
        a, b = prune(a), prune(b)
        if a is b:
            return
        if isinstance(a, Meta) or isinstance(b, Meta):
            m, t = (a, b) if isinstance(a, Meta) else (b, a)
            if _occurs(m, t):
                raise self._fail("TypeMismatch", "infinite type", span)
            m.ref = t
            return
        if isinstance(a, tuple) and isinstance(b, tuple) and a[0] == b[0]:
            match a[0]:
                case "fun":
                    self.unify(a[1], b[1], span)
                    self.unify(a[2], b[2], span)
                    return
                case "poly" if a[2] is b[2]:
                    self.unify(a[3], _rename(b[3], b[1], ("var", a[1])), span)
                    return
        if a == b:
            return
        raise self._fail("TypeMismatch", f"expected {show_itype(b)}, found {show_itype(a)}", span)

    # ------------------------------------------------------------ types

    def type(self, st: SType, sc: Scope) -> tuple[RType, object]:
        match st:
            case STBase(name, span):
                return self._base(name, sc, span)
            case STRefn(base, var, pred, span):
                b, it = self._base(base.name, sc, base.span)
                p, _ = self.expr(pred, sc.bind(var, it), "Bool")
                return Refn(b.base, p, var), it
            case STFunc(param, arg, res, _):
                a, ia = self.type(arg, sc)
                r, ir = self.type(res, sc.bind(param or "_", ia))
                return Func(a, r, param or "x"), ("fun", ia, ir)
            case STExists(param, bound, body, span):
                if not self.allow_exists:
                    raise RejectedExistentialAnnotation(span)
                a, ia = self.type(bound, sc)
                r, ir = self.type(body, sc.bind(param, ia))
                return Exists(a, r, param), ir
            case STPoly(param, kind, body, _):
                uid = next(_uids)
                b, ib = self.type(body, sc.bind_ty(param, uid))
                return Poly(kind, b, param), ("poly", uid, kind, ib)
        raise TypeError(f"not a surface type: {st!r}")

    def _base(self, name: str, sc: Scope, span: Span | None) -> tuple[Refn, object]:
        if name == "Int":
            return Refn(TInt()), "Int"
        if name == "Bool":
            return Refn(TBool()), "Bool"
        for i, (n, uid) in enumerate(reversed(sc.types)):
            if n == name:
                return Refn(TVarBound(i)), ("var", uid)
        if "$" in name:
            hint, _, ident = name.partition("$")
            nm = Name(int(ident), hint)
            return Refn(TVarFree(nm)), ("free", nm)
        if name in self.type_globals:
            nm = self.type_globals[name]
            return Refn(TVarFree(nm)), ("free", nm)
        raise self._fail("UnboundTypeVariable", f"type variable {name!r} is not in scope", span)

    # ------------------------------------------------------------ expressions

    def expr(self, se: SExpr, sc: Scope, expected=None) -> tuple[Expr, object]:
        e, it = self._expr(se, sc, expected)
        if expected is not None:
            self.unify(it, expected, se.span)
        return e, it

    def _expr(self, se: SExpr, sc: Scope, expected) -> tuple[Expr, object]:
        match se:
            case SInt(n):
                return int_(n), "Int"
            case SBool(b):
                return (TRUE if b else FALSE), "Bool"
            case SVar(name, span):
                for i, (n, it) in enumerate(reversed(sc.terms)):
                    if n == name:
                        return BoundVar(i), it
                if name in self.globals:
                    nm, it = self.globals[name]
                    return FreeVar(nm), it
                raise self._fail("UnboundVariable", f"{name!r} is not in scope", span)
            case SFree(name):
                it = self.free_types.get(name)
                if it is None:
                    it = self.free_types[name] = Meta()
                return FreeVar(name), it
            case SPrim(tag, arg):
                p = Prim(tag, arg)
                return p, itype_of(prim_type(p))
            case SLam(param, body):
                exp = prune(expected)
                if isinstance(exp, tuple) and exp[0] == "fun":
                    a, r = exp[1], exp[2]
                else:
                    a, r = Meta(), None
                b, rb = self.expr(body, sc.bind(param, a), r)
                return Lam(b, param), ("fun", a, rb)
            case STLam(param, kind, body):
                uid = next(_uids)
                exp = prune(expected)
                want = None
                if isinstance(exp, tuple) and exp[0] == "poly" and exp[2] is kind:
                    want = _rename(exp[3], exp[1], ("var", uid))
                b, ib = self.expr(body, sc.bind_ty(param, uid), want)
                return TLam(kind, b, param), ("poly", uid, kind, ib)
            case SApp(fn, arg, span):
                f, tf = self.expr(fn, sc)
                tf = prune(tf)
                if isinstance(tf, Meta):
                    a, r = Meta(), Meta()
                    self.unify(tf, ("fun", a, r), span)
                    tf = ("fun", a, r)
                if not (isinstance(tf, tuple) and tf[0] == "fun"):
                    raise self._fail("NotAFunction", f"applying a value of type {show_itype(tf)}", fn.span)
                x, _ = self.expr(arg, sc, tf[1])
                return App(f, x), tf[2]
            case STyApp(fn, ty, span):
                f, tf = self.expr(fn, sc)
                tf = prune(tf)
                if not (isinstance(tf, tuple) and tf[0] == "poly"):
                    raise self._fail("NotAPolytype", f"instantiating a value of type {show_itype(tf)}", fn.span)
                t, it = self.type(ty, sc)
                return TApp(f, t), _rename(tf[3], tf[1], it)
            case SLet(name, bound, body):
                b, tb = self.expr(bound, sc)
                e, te = self.expr(body, sc.bind(name, tb), expected)
                return Let(b, e, name), te
            case SAnn(inner, ty):
                t, it = self.type(ty, sc)
                e, _ = self.expr(inner, sc, it)
                return Ann(e, t), it
            case SNot(arg):
                a, _ = self.expr(arg, sc, "Bool")
                return App(Prim("not"), a), "Bool"
            case SBin(op, lhs, rhs, span):
                return self._binary(op, lhs, rhs, sc, span), "Bool"
        raise TypeError(f"not a surface expression: {se!r}")

    def _binary(self, op: str, lhs: SExpr, rhs: SExpr, sc: Scope, span) -> Expr:
        if op in ("&&", "||", "<=>"):
            a, _ = self.expr(lhs, sc, "Bool")
            b, _ = self.expr(rhs, sc, "Bool")
            tag = {"&&": "and", "||": "or", "<=>": "iff"}[op]
            return App(App(Prim(tag), a), b)
        a, ta = self.expr(lhs, sc)
        b, _ = self.expr(rhs, sc, ta)
        base = Refn(_Pending(ta, tuple(uid for _, uid in sc.types), span))

        def leq(x, y):
            return App(App(TApp(Prim("leq"), base), x), y)

        def eq(x, y):
            return App(App(TApp(Prim("eq"), base), x), y)

        def lt(x, y):
            return App(App(Prim("and"), leq(x, y)), App(Prim("not"), eq(x, y)))

        match op:
            case "<=":
                return leq(a, b)
            case "==":
                return eq(a, b)
            case "<":
                return lt(a, b)
            case "!=":
                return App(Prim("not"), eq(a, b))
            case ">=":
                return leq(b, a)
            case ">":
                return lt(b, a)
        raise ValueError(op)


# ---------------------------------------------------------------- programs


@dataclass
class ElaboratedDef:
    name: Name
    signature: RType
    body: Expr
    span: Span


@dataclass
class ElaboratedProgram:
    defs: list[ElaboratedDef]
    main: Expr | None
    main_span: Span | None = None
    file: str = "<input>"

    def env_before(self, i: int) -> Env:
        return Env(tuple(TermBind(d.name, d.signature) for d in self.defs[:i]))

    def env(self) -> Env:
        return self.env_before(len(self.defs))

    def as_expr(self) -> Expr:
        """The whole program as one closed term: nested lets of annotated definitions."""
        if self.main is None:
            raise ValueError("program has no main expression")
        e = self.main
        for d in reversed(self.defs):
            e = Let(Ann(d.body, d.signature), close_expr(e, d.name), d.name.hint)
        return e


def elaborate_program(prog: Program) -> ElaboratedProgram:
    """Raises ParseError for malformed signatures, Diagnostic for scope and shape errors."""
    el = Elaborator(allow_exists=False)
    out = []
    for i, d in enumerate(prog.defs):
        out.append(_elaborate_def(el, d, Name(i + 1, d.name)))
    main = None
    if prog.main is not None:
        m, _ = el.expr(prog.main, Scope())
        main = el.finish(m)
    return ElaboratedProgram(out, main, prog.main.span if prog.main is not None else None, prog.file)


def _elaborate_def(el: Elaborator, d: Definition, name: Name) -> ElaboratedDef:
    sig, it = el.type(d.signature, Scope())
    sig = el.finish(sig)
    body, _ = el.expr(d.body, Scope(), it)
    body = el.finish(body)
    el.add_global(name, sig)
    return ElaboratedDef(name, sig, body, d.span)

