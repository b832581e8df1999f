"""Bidirectional checking for refinement types with existentials and kinded polymorphism.

The environment kept during checking never contains existential types: a
binding whose type is an existential is unpacked into a chain of fresh names,
one per witness, and types synthesized underneath are packed back into
existentials over those names afterwards.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass

from .diagnostics import Diagnostic
from .implication import BuiltinOracle, Invalid, NotBoolean, Oracle, Valid
from .primitives import prim_type
from .substitution import open_tyvar_with, open_tyvar_with_expr
from .syntax import (
    TRUE, Ann, App, BaseTy, BoundVar, Env, Exists, Expr, FreeVar, Func, Kind,
    Lam, Let, Name, NameSupply, Poly, Prim, RType, Refn, TApp, TBool, TInt,
    TLam, TVarFree, TermBind, close_tyvar, close_type,
    conjuncts, is_locally_closed, is_value, mk_and, mk_eq, open_expr,
    open_pred, open_tyvar, open_tyvar_expr, open_type,
)
from .sysf import FTypeError, erase, erase_env, f_check_or_raise, FBool


@dataclass(frozen=True)
class CheckerConfig:
    selfify: bool = True
    # S-Base discharges its premise with the oracle; switching this off is a
    # deliberately broken checker used to test that the harness notices
    sbase_implication: bool = True
    max_witnesses: int = 32


def selfify(t: RType, x: Name, k: Kind) -> RType:
    """Strengthen a base type so that its values equal the variable x."""
    match t:
        case Refn(base, pred, hint) if k is Kind.BASE:
            eq = mk_eq(base, BoundVar(0), FreeVar(x))
            return Refn(base, eq if pred == TRUE else mk_and(pred, eq), hint)
        case Exists(bound, body, hint):
            return Exists(bound, selfify(body, x, k), hint)
    return t


def minimal_kind(env: Env, t: RType) -> Kind:
    """The least kind of a type already known to be well-formed in env."""
    match t:
        case Refn(TVarFree(name), _, _):
            return env.kind_of(name) or Kind.STAR
        case Refn():
            return Kind.BASE
        case Exists(_, body, _):
            return minimal_kind(env, body)
    return Kind.STAR


def _same_base(a: BaseTy, b: BaseTy) -> bool:
    return a == b


def _describe_base(b: BaseTy) -> str:
    match b:
        case TBool():
            return "Bool"
        case TInt():
            return "Int"
        case TVarFree(name):
            return repr(name)
    return repr(b)


class Checker:
    """One checking session: owns a fresh-name supply and an oracle handle."""

    def __init__(self, oracle: Oracle | None = None, config: CheckerConfig | None = None):
        self.oracle = oracle or BuiltinOracle()
        self.config = config or CheckerConfig()
        self.supply = NameSupply()
        self.stack: list[str] = []

    # ------------------------------------------------------------ plumbing

    def _fail(self, code: str, message: str, rule: str | None = None, **kw) -> Diagnostic:
        return Diagnostic(code, message, rule=rule, trail=list(self.stack), **kw)

    @contextmanager
    def _rule(self, text: str):
        self.stack.append(text)
        try:
            yield
        finally:
            self.stack.pop()

    def _reserve(self, *items) -> None:
        self.supply.reserve_in(*items)

    def _unpack(self, env: Env, name: Name, t: RType, out: list) -> Env:
        match t:
            case Exists(bound, body, hint):
                z = self.supply.fresh(hint)
                env = self._unpack(env, z, bound, out)
                return self._unpack(env, name, open_type(body, z), out)
        out.append((name, t))
        return env.bind(name, t)

    @staticmethod
    def _pack(binds: list, t: RType) -> RType:
        for name, ty in reversed(binds):
            t = Exists(ty, close_type(t, name), name.hint or "x")
        return t

    # ------------------------------------------------------------ public entry points

    def synth(self, env: Env, e: Expr) -> RType:
        self._reserve(env, e)
        return self._synth(env, e)

    def check(self, env: Env, e: Expr, t: RType) -> None:
        self._reserve(env, e, t)
        self._check(env, e, t)

    def sub(self, env: Env, s: RType, t: RType) -> None:
        self._reserve(env, s, t)
        self._sub(env, s, t)

    def wf_type(self, env: Env, t: RType) -> Kind:
        self._reserve(env, t)
        return self._wf(env, t)

    def wf_env(self, env: Env) -> None:
        """Raise unless every name is distinct and every type is well-formed in its prefix."""
        self._reserve(env)
        seen: set[Name] = set()
        prefix = Env()
        for b in env:
            if b.name in seen:
                raise self._fail("DuplicateBinding", f"{b.name!r} is bound twice", "WFE-Bind")
            seen.add(b.name)
            if isinstance(b, TermBind):
                try:
                    self._wf(prefix, b.ty)
                except Diagnostic as d:
                    raise self._fail(
                        "IllFormedBindingType", f"type of {b.name!r} is ill-formed: {d.message}",
                        "WFE-Bind", cause=d,
                    ) from None
            prefix = Env(prefix.bindings + (b,))

    # ------------------------------------------------------------ well-formedness

    def _wf(self, env: Env, t: RType) -> Kind:
        match t:
            case Refn(base, pred, _):
                match base:
                    case TBool() | TInt():
                        k = Kind.BASE
                    case TVarFree(name):
                        k = env.kind_of(name)
                        if k is None:
                            raise self._fail("UnboundTypeVariable", f"{name!r} is not in scope", "WT-Var")
                    case _:
                        raise self._fail("NotLocallyClosed", f"dangling type index in {t!r}", "WT-Var")
                if pred == TRUE:
                    return k
                if k is Kind.STAR:
                    raise self._fail(
                        "RefinedStarVariable",
                        f"type variable {_describe_base(base)} has kind * and can only be refined with true",
                        "WT-Refn",
                    )
                y = self.supply.fresh("v")
                delta = erase_env(env).bind(y, erase(Refn(base)))
                try:
                    f_check_or_raise(delta, open_pred(pred, y), FBool())
                except FTypeError as err:
                    raise self._fail("PredicateNotBool", f"refinement is not a boolean: {err.message}", "WT-Refn") from None
                return Kind.BASE
            case Func(arg, res, hint):
                self._wf(env, arg)
                x = self.supply.fresh(hint)
                self._wf(env.bind(x, arg), open_type(res, x))
                return Kind.STAR
            case Exists(bound, body, hint):
                self._wf(env, bound)
                x = self.supply.fresh(hint)
                return self._wf(env.bind(x, bound), open_type(body, x))
            case Poly(kind, body, hint):
                a = self.supply.fresh(hint)
                self._wf(env.bind_ty(a, kind), open_tyvar(body, a))
                return Kind.STAR
        raise TypeError(f"not a type: {t!r}")

    # ------------------------------------------------------------ synthesis

    def _synth(self, env: Env, e: Expr) -> RType:
        match e:
            case Prim():
                return prim_type(e)
            case FreeVar(name):
                t = env.lookup(name)
                if t is None:
                    raise self._fail("UnboundVariable", f"{name!r} is not in scope", "T-Var")
                if not self.config.selfify:
                    return t
                return selfify(t, name, minimal_kind(env, t))
            case BoundVar(index):
                raise self._fail("NotLocallyClosed", f"dangling index {index}")
            case Lam():
                raise self._fail("CannotSynthesizeLambda", "a lambda needs a type annotation here", "T-Abs")
            case TLam(kind, body, hint):
                with self._rule("T-TAbs"):
                    a = self.supply.fresh(hint)
                    t = self._synth(env.bind_ty(a, kind), open_tyvar_expr(body, a))
                    return Poly(kind, close_tyvar(t, a), hint)
            case App(Lam(body, _), (Lam() | TLam()) as arg) | Let((Lam() | TLam()) as arg, body, _):
                # an unannotated abstraction has no type to bind; type the reduct
                with self._rule("T-App of a lambda to an abstraction"):
                    return self._synth(env, open_expr(body, arg))
            case App(Lam(body, hint), arg):
                with self._rule("T-App of a lambda"):
                    return self._synth_let(env, arg, body, hint)
            case TApp(TLam(), _):
                return self._synth(env, self._instantiate(env, e))
            case App(TApp(TLam(), _) as fn, arg):
                return self._synth(env, App(self._instantiate(env, fn), arg))
            case App(fn, arg):
                with self._rule("T-App"):
                    return self._synth_app(env, fn, arg)
            case TApp(fn, ty):
                with self._rule("T-TApp"):
                    return self._synth_tapp(env, fn, ty)
            case Let(bound, body, hint):
                with self._rule("T-Let"):
                    return self._synth_let(env, bound, body, hint)
            case Ann(sub, ty):
                with self._rule("T-Ann"):
                    self._wf(env, ty)
                    self._check(env, sub, ty)
                    return ty
        raise TypeError(f"not an expression: {e!r}")

    def _synth_let(self, env: Env, bound: Expr, body: Expr, hint: str) -> RType:
        tb = self._synth(env, bound)
        binds: list = []
        x = self.supply.fresh(hint)
        inner = self._unpack(env, x, tb, binds)
        return self._pack(binds, self._synth(inner, open_expr(body, x)))

    def _synth_app(self, env: Env, fn: Expr, arg: Expr) -> RType:
        tf = self._synth(env, fn)
        binds: list = []
        while isinstance(tf, Exists):
            z = self.supply.fresh(tf.hint)
            env = self._unpack(env, z, tf.bound, binds)
            tf = open_type(tf.body, z)
        if not isinstance(tf, Func):
            raise self._fail("NotAFunction", "applied expression does not have a function type", "T-App")
        if isinstance(arg, FreeVar):
            self._check(env, arg, tf.arg)
            result = open_type(tf.res, arg)
        elif isinstance(arg, (Lam, TLam)):
            self._check(env, arg, tf.arg)
            result = Exists(tf.arg, tf.res, tf.hint)
        else:
            ta = self._synth(env, arg)
            with self._rule("argument against domain"):
                self._sub_wrapped(env, ta, tf.arg)
            result = Exists(ta, tf.res, tf.hint)
        return self._pack(binds, result)

    def _instantiate(self, env: Env, e: TApp) -> Expr:
        """Type-abstraction redex: check the kind, then substitute the type into the body."""
        with self._rule("T-TApp of a type abstraction"):
            lam = e.fn
            k = self._wf(env, e.ty)
            if not k <= lam.kind:
                raise self._fail(
                    "KindMismatch", f"type argument has kind {k.value}, expected {lam.kind.value}", "T-TApp"
                )
            return open_tyvar_with_expr(lam.body, e.ty)

    def _synth_tapp(self, env: Env, fn: Expr, ty: RType) -> RType:
        tf = self._synth(env, fn)
        binds: list = []
        while isinstance(tf, Exists):
            z = self.supply.fresh(tf.hint)
            env = self._unpack(env, z, tf.bound, binds)
            tf = open_type(tf.body, z)
        if not isinstance(tf, Poly):
            raise self._fail("NotAPolytype", "instantiated expression is not polymorphic", "T-TApp")
        k = self._wf(env, ty)
        if not k <= tf.kind:
            raise self._fail(
                "KindMismatch", f"type argument has kind {k.value}, expected {tf.kind.value}", "T-TApp"
            )
        return self._pack(binds, open_tyvar_with(tf.body, ty))

    # ------------------------------------------------------------ checking

    def _check(self, env: Env, e: Expr, t: RType) -> None:
        match e, t:
            case (Lam() | TLam()), Exists():
                with self._rule("S-Witn for an abstraction"):
                    self._check_against_exists(env, e, t)
                return
            case Lam(body, _), Func(arg, res, hint):
                with self._rule("T-Abs"):
                    x = self.supply.fresh(e.hint)
                    inner = self._unpack(env, x, arg, [])
                    self._check(inner, open_expr(body, x), open_type(res, x))
                return
            case Lam(), _:
                raise self._fail("ExpectedFunctionType", "a lambda can only have a function type", "T-Abs")
            case TLam(kind, body, hint), Poly(k, tbody, _):
                if kind is not k:
                    raise self._fail(
                        "KindMismatchOnTLam",
                        f"type abstraction over kind {kind.value} checked against a type over kind {k.value}",
                        "T-TAbs",
                    )
                with self._rule("T-TAbs"):
                    a = self.supply.fresh(hint)
                    self._check(env.bind_ty(a, kind), open_tyvar_expr(body, a), open_tyvar(tbody, a))
                return
            case TLam(), _:
                raise self._fail(
                    "ExpectedPolymorphicType", "a type abstraction can only have a polymorphic type", "T-TAbs"
                )
            case (App(Lam(body, _), (Lam() | TLam()) as arg) | Let((Lam() | TLam()) as arg, body, _)), _:
                with self._rule("T-App of a lambda to an abstraction"):
                    self._check(env, open_expr(body, arg), t)
                return
            case Let(bound, body, hint), _:
                with self._rule("T-Let"):
                    self._check_let(env, bound, body, hint, t)
                return
            case App(Lam(body, hint), arg), _:
                with self._rule("T-App of a lambda"):
                    self._check_let(env, arg, body, hint, t)
                return
            case TApp(TLam(), _), _:
                self._check(env, self._instantiate(env, e), t)
                return
            case App(TApp(TLam(), _) as fn, arg), _:
                self._check(env, App(self._instantiate(env, fn), arg), t)
                return
        s = self._synth(env, e)
        with self._rule("T-Sub"):
            self._sub_wrapped(env, s, t)

    def _check_let(self, env: Env, bound: Expr, body: Expr, hint: str, t: RType) -> None:
        tb = self._synth(env, bound)
        x = self.supply.fresh(hint)
        inner = self._unpack(env, x, tb, [])
        self._check(inner, open_expr(body, x), t)

    def _check_against_exists(self, env: Env, e: Expr, t: Exists) -> None:
        tried = []
        for w in self._witness_candidates(env, None, t):
            try:
                self._check(env, w, t.bound)
                self._check(env, e, open_type(t.body, w))
                return
            except Diagnostic:
                tried.append(w)
        raise self._fail("WitnessNotFound", f"no witness among {len(tried)} candidates", "S-Witn")

    def _sub_wrapped(self, env: Env, s: RType, t: RType) -> None:
        try:
            self._sub(env, s, t)
        except Diagnostic as d:
            if d.code == "ImplicationUnknown":
                raise
            raise self._fail(
                "SubtypeFailure", d.message, d.rule, query=d.query, cause=d
            ) from None

    # ------------------------------------------------------------ subtyping

    def _sub(self, env: Env, s: RType, t: RType) -> None:
        if isinstance(s, Exists):
            with self._rule("S-Bind"):
                z = self.supply.fresh(s.hint)
                inner = self._unpack(env, z, s.bound, [])
                self._sub(inner, open_type(s.body, z), t)
            return
        if isinstance(t, Exists):
            with self._rule("S-Witn"):
                self._sub_witness(env, s, t)
            return
        match s, t:
            case Refn(b1, p1, _), Refn(b2, p2, _):
                if not _same_base(b1, b2):
                    raise self._fail(
                        "ErasureMismatch", f"{_describe_base(b1)} is not {_describe_base(b2)}", "S-Base"
                    )
                if p2 == TRUE or p1 == p2 or not self.config.sbase_implication:
                    return
                y = self.supply.fresh("v")
                inner = env.bind(y, Refn(b1))
                try:
                    verdict, query = self.oracle.check_impl(inner, open_pred(p1, y), open_pred(p2, y))
                except NotBoolean as err:
                    raise self._fail("PredicateNotBool", err.message, "S-Base") from None
                if isinstance(verdict, Valid):
                    return
                if isinstance(verdict, Invalid):
                    raise self._fail("ImplicationFailed", "refinement does not imply the expected one", "S-Base", query=query)
                raise self._fail(
                    "ImplicationUnknown", f"could not decide implication ({verdict.reason})", "S-Base", query=query
                )
            case Func(a1, r1, _), Func(a2, r2, hint):
                with self._rule("S-Func"):
                    self._sub(env, a2, a1)
                    x = self.supply.fresh(hint)
                    inner = self._unpack(env, x, a2, [])
                    self._sub(inner, open_type(r1, x), open_type(r2, x))
                return
            case Poly(k1, b1, _), Poly(k2, b2, hint):
                if k1 is not k2:
                    raise self._fail("KindMismatch", f"quantifier kinds {k1.value} and {k2.value} differ", "S-Poly")
                with self._rule("S-Poly"):
                    a = self.supply.fresh(hint)
                    self._sub(env.bind_ty(a, k1), open_tyvar(b1, a), open_tyvar(b2, a))
                return
        raise self._fail("ErasureMismatch", "types have different shapes", "S-Base")

    def _sub_witness(self, env: Env, s: RType, t: Exists) -> None:
        tried = []
        last: Diagnostic | None = None
        for w in self._witness_candidates(env, s, t):
            tried.append(w)
            try:
                self._check(env, w, t.bound)
                self._sub(env, s, open_type(t.body, w))
                return
            except Diagnostic as d:
                if last is None or d.query is not None:
                    last = d
        shown = ", ".join(_show_witness(w) for w in tried) or "none"
        raise self._fail(
            "WitnessNotFound", f"no witness for the existential among candidates: {shown}", "S-Witn",
            query=last.query if last else None, cause=last,
        )

    def _witness_candidates(self, env: Env, s: RType | None, t: Exists) -> list[Expr]:
        out: list[Expr] = []

        def add(u):
            if is_value(u) and not isinstance(u, (Lam, TLam)) and is_locally_closed(u) and u not in out:
                out.append(u)

        # conjuncts `x = u` in the body, where x is the witness being chosen
        body = t.body
        if isinstance(body, Refn):
            for c in conjuncts(body.pred):
                for u in _eq_sides(c, BoundVar(1)):
                    add(u)
        # `v = u` facts in the bound type and in the subtype's refinement
        for ty in (t.bound, s):
            if isinstance(ty, Refn):
                for c in conjuncts(ty.pred):
                    for u in _eq_sides(c, BoundVar(0)):
                        add(u)
        if isinstance(s, Refn):
            for lit in _literals(s.pred):
                add(lit)
        want = erase(t.bound)
        for b in reversed(env.bindings):
            if isinstance(b, TermBind) and erase(b.ty) == want:
                add(FreeVar(b.name))
        if want == FBool():
            add(Prim("true"))
            add(Prim("false"))
        return out[: self.config.max_witnesses]


def _eq_sides(c: Expr, target: Expr) -> list[Expr]:
    """The other side of an equation whose one side is `target`."""
    match c:
        case App(App(TApp(Prim("eq"), _), a), b) | App(App(Prim("eq_int" | "iff"), a), b):
            if a == target:
                return [b]
            if b == target:
                return [a]
    return []


def _literals(e: Expr) -> list[Expr]:
    found: list[Expr] = []

    def go(x):
        match x:
            case Prim("int" | "true" | "false"):
                found.append(x)
            case App(f, a):
                go(f)
                go(a)
            case Lam(body) | TLam(_, body):
                go(body)
            case Let(bound, body):
                go(bound)
                go(body)
            case Ann(sub, _) | TApp(sub, _):
                go(sub)

    go(e)
    return found


def _show_witness(w: Expr) -> str:
    match w:
        case FreeVar(name):
            return repr(name)
        case Prim("int", n):
            return str(n)
        case Prim(tag):
            return tag
    return repr(w)

