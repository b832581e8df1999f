"""Refinement erasure and a bidirectional checker for the unrefined System F layer."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .primitives import prim_type
from .substitution import open_tyvar_with_expr
from .syntax import (
    Ann, App, BoundVar, Env, Exists, Expr, FreeVar, Func, Kind, Lam, Let, Name,
    NameSupply, Poly, Prim, RType, Refn, TApp, TBool, TermBind, TInt, TLam,
    TVarBound, TVarFree, open_expr, open_tyvar_expr,
)


@dataclass(frozen=True)
class FBool:
    def __repr__(self):
        return "Bool"


@dataclass(frozen=True)
class FInt:
    def __repr__(self):
        return "Int"


@dataclass(frozen=True)
class FTVar:
    name: Name

    def __repr__(self):
        return repr(self.name)


@dataclass(frozen=True)
class FTBound:
    index: int

    def __repr__(self):
        return f"'{self.index}"


@dataclass(frozen=True)
class FFunc:
    arg: FType
    res: FType

    def __repr__(self):
        return f"({self.arg!r} -> {self.res!r})"


@dataclass(frozen=True)
class FPoly:
    kind: Kind
    body: FType

    def __repr__(self):
        return f"(forall:{self.kind.value}. {self.body!r})"


FType = Union[FBool, FInt, FTVar, FTBound, FFunc, FPoly]


class FTypeError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


# ---------------------------------------------------------------- erasure


def erase(t: RType) -> FType:
    match t:
        case Refn(TBool(), _, _):
            return FBool()
        case Refn(TInt(), _, _):
            return FInt()
        case Refn(TVarFree(name), _, _):
            return FTVar(name)
        case Refn(TVarBound(index), _, _):
            return FTBound(index)
        case Func(arg, res, _):
            return FFunc(erase(arg), erase(res))
        case Exists(_, body, _):
            return erase(body)
        case Poly(kind, body, _):
            return FPoly(kind, erase(body))
    raise TypeError(f"not a type: {t!r}")


@dataclass(frozen=True)
class FEnv:
    """Erased environment: term names map to F types, type names to kinds."""

    terms: tuple[tuple[Name, FType], ...] = ()
    types: tuple[tuple[Name, Kind], ...] = ()

    def bind(self, name: Name, tau: FType) -> FEnv:
        return FEnv(self.terms + ((name, tau),), self.types)

    def bind_ty(self, name: Name, kind: Kind) -> FEnv:
        return FEnv(self.terms, self.types + ((name, kind),))

    def lookup(self, name: Name) -> FType | None:
        for n, tau in reversed(self.terms):
            if n == name:
                return tau
        return None

    def kind_of(self, name: Name) -> Kind | None:
        for n, k in reversed(self.types):
            if n == name:
                return k
        return None

    def names(self) -> set[Name]:
        return {n for n, _ in self.terms} | {n for n, _ in self.types}


def erase_env(env: Env) -> FEnv:
    terms, types = [], []
    for b in env:
        if isinstance(b, TermBind):
            terms.append((b.name, erase(b.ty)))
        else:
            types.append((b.name, b.kind))
    return FEnv(tuple(terms), tuple(types))


# ---------------------------------------------------------------- F type operations


def _fmap(tau: FType, on_bound, depth: int = 0) -> FType:
    match tau:
        case FBool() | FInt():
            return tau
        case FTVar() | FTBound():
            return on_bound(tau, depth)
        case FFunc(a, r):
            return FFunc(_fmap(a, on_bound, depth), _fmap(r, on_bound, depth))
        case FPoly(k, body):
            return FPoly(k, _fmap(body, on_bound, depth + 1))
    raise TypeError(f"not an F type: {tau!r}")


def fopen(tau: FType, u: FType) -> FType:
    """Instantiate the outermost dangling type index of `tau` with closed `u`."""

    def hit(t, d):
        return u if isinstance(t, FTBound) and t.index == d else t

    return _fmap(tau, hit)


def fclose(tau: FType, name: Name) -> FType:
    def hit(t, d):
        return FTBound(d) if isinstance(t, FTVar) and t.name == name else t

    return _fmap(tau, hit)


def f_wf_type(delta: FEnv, tau: FType, k: Kind = Kind.STAR) -> bool:
    match tau:
        case FBool() | FInt():
            return True
        case FTVar(name):
            kv = delta.kind_of(name)
            return kv is not None and kv <= k
        case FTBound():
            return False
        case FFunc(a, r):
            return k is Kind.STAR and f_wf_type(delta, a) and f_wf_type(delta, r)
        case FPoly(kp, body):
            if k is not Kind.STAR:
                return False
            alpha = NameSupply(max((n.id for n in delta.names()), default=0)).fresh("a")
            return f_wf_type(delta.bind_ty(alpha, kp), fopen(body, FTVar(alpha)))
    return False


# ---------------------------------------------------------------- typing


class _FChecker:
    def __init__(self, delta: FEnv, *items):
        self.supply = NameSupply()
        self.supply.reserve(delta.names())
        for x in items:
            self.supply.reserve_in(x)
        for _, tau in delta.terms:
            self._reserve_ftype(tau)

    def _reserve_ftype(self, tau):
        def hit(t, d):
            if isinstance(t, FTVar):
                self.supply.reserve([t.name])
            return t

        _fmap(tau, hit)

    def instantiate(self, delta: FEnv, e: TApp) -> Expr:
        """Type-abstraction redex: check the kind, then substitute into the body."""
        tau = erase(e.ty)
        if not f_wf_type(delta, tau, e.fn.kind):
            raise FTypeError("KindMismatch", f"{tau!r} does not have kind {e.fn.kind.value}")
        return open_tyvar_with_expr(e.fn.body, e.ty)

    def synth(self, delta: FEnv, e: Expr) -> FType:
        match e:
            case Prim():
                return erase(prim_type(e))
            case FreeVar(name):
                tau = delta.lookup(name)
                if tau is None:
                    raise FTypeError("UnboundVariable", f"{name!r} is not bound")
                return tau
            case BoundVar():
                raise FTypeError("NotLocallyClosed", f"dangling index {e.index}")
            case Lam():
                raise FTypeError("CannotSynthesizeLambda", "lambda needs an annotation or expected type")
            case TLam(kind, body, hint):
                alpha = self.supply.fresh(hint)
                tau = self.synth(delta.bind_ty(alpha, kind), open_tyvar_expr(body, alpha))
                return FPoly(kind, fclose(tau, alpha))
            case App(Lam(body, _), (Lam() | TLam()) as arg) | Let((Lam() | TLam()) as arg, body, _):
                # an abstraction argument has no synthesized type; type the reduct
                return self.synth(delta, open_expr(body, arg))
            case TApp(TLam(), _):
                return self.synth(delta, self.instantiate(delta, e))
            case App(TApp(TLam(), _) as fn, arg):
                return self.synth(delta, App(self.instantiate(delta, fn), arg))
            case App(Lam(body, hint), arg):
                tau_x = self.synth(delta, arg)
                y = self.supply.fresh(hint)
                return self.synth(delta.bind(y, tau_x), open_expr(body, y))
            case App(fn, arg):
                tf = self.synth(delta, fn)
                if not isinstance(tf, FFunc):
                    raise FTypeError("NotAFunction", f"applying a value of type {tf!r}")
                self.check(delta, arg, tf.arg)
                return tf.res
            case TApp(fn, ty):
                tf = self.synth(delta, fn)
                if not isinstance(tf, FPoly):
                    raise FTypeError("NotAPolytype", f"instantiating a value of type {tf!r}")
                tau = erase(ty)
                if not f_wf_type(delta, tau, tf.kind):
                    raise FTypeError("KindMismatch", f"{tau!r} does not have kind {tf.kind.value}")
                return fopen(tf.body, tau)
            case Let(bound, body, hint):
                tau_x = self.synth(delta, bound)
                y = self.supply.fresh(hint)
                return self.synth(delta.bind(y, tau_x), open_expr(body, y))
            case Ann(sub, ty):
                tau = erase(ty)
                if not f_wf_type(delta, tau):
                    raise FTypeError("KindMismatch", f"annotation {tau!r} is ill-formed")
                self.check(delta, sub, tau)
                return tau
        raise TypeError(f"not an expression: {e!r}")

    def check(self, delta: FEnv, e: Expr, tau: FType) -> None:
        match e, tau:
            case Lam(body, hint), FFunc(a, r):
                y = self.supply.fresh(hint)
                self.check(delta.bind(y, a), open_expr(body, y), r)
                return
            case Lam(), _:
                raise FTypeError("TypeMismatch", f"lambda checked against {tau!r}")
            case TLam(kind, body, hint), FPoly(k, b):
                if kind is not k:
                    raise FTypeError("KindMismatch", f"type abstraction over {kind.value}, expected {k.value}")
                alpha = self.supply.fresh(hint)
                self.check(delta.bind_ty(alpha, kind), open_tyvar_expr(body, alpha), fopen(b, FTVar(alpha)))
                return
            case (App(Lam(body, _), (Lam() | TLam()) as arg) | Let((Lam() | TLam()) as arg, body, _)), _:
                self.check(delta, open_expr(body, arg), tau)
                return
            case TApp(TLam(), _), _:
                self.check(delta, self.instantiate(delta, e), tau)
                return
            case App(TApp(TLam(), _) as fn, arg), _:
                self.check(delta, App(self.instantiate(delta, fn), arg), tau)
                return
            case Let(bound, body, hint), _:
                tau_x = self.synth(delta, bound)
                y = self.supply.fresh(hint)
                self.check(delta.bind(y, tau_x), open_expr(body, y), tau)
                return
            case App(Lam(body, hint), arg), _:
                tau_x = self.synth(delta, arg)
                y = self.supply.fresh(hint)
                self.check(delta.bind(y, tau_x), open_expr(body, y), tau)
                return
        got = self.synth(delta, e)
        if got != tau:
            raise FTypeError("TypeMismatch", f"expected {tau!r}, got {got!r}")


def f_synth(delta: FEnv, e: Expr) -> FType:
    return _FChecker(delta, e).synth(delta, e)


def f_check(delta: FEnv, e: Expr, tau: FType) -> bool:
    try:
        _FChecker(delta, e).check(delta, e, tau)
    except FTypeError:
        return False
    return True


def f_check_or_raise(delta: FEnv, e: Expr, tau: FType) -> None:
    _FChecker(delta, e).check(delta, e, tau)

