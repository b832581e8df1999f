"""Locally nameless abstract syntax for terms, types, kinds and environments.

Term binders (Lam, Let, the refinement variable of Refn, the argument of Func,
the witness of Exists) and type binders (TLam, Poly) count de Bruijn indices in
two separate namespaces. Free variables are `Name`s.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union


@dataclass(frozen=True, order=True)
class Name:
    id: int
    hint: str = field(default="", compare=False)

    def __repr__(self):
        return f"{self.hint or 'n'}${self.id}"


class Kind(enum.Enum):
    BASE = "B"
    STAR = "*"

    def __repr__(self):
        return self.value

    def __le__(self, other: Kind) -> bool:
        # B is a sub-kind of * (WT-Kind)
        return self is other or other is Kind.STAR


# ---------------------------------------------------------------- terms

PRIM_TAGS = frozenset(
    {
        "true", "false", "int",
        "and", "or", "not", "iff",
        "leq", "eq",
        "leq_int", "eq_int", "leq_bool",
        "leqN", "eqN",
    }
)


@dataclass(frozen=True)
class Prim:
    tag: str
    arg: int | None = None

    def __post_init__(self):
        if self.tag not in PRIM_TAGS:
            raise ValueError(f"unknown primitive {self.tag!r}")
        if (self.tag in ("int", "leqN", "eqN")) != (self.arg is not None):
            raise ValueError(f"primitive {self.tag} arity mismatch")


@dataclass(frozen=True)
class FreeVar:
    name: Name


@dataclass(frozen=True)
class BoundVar:
    index: int


@dataclass(frozen=True)
class Lam:
    body: Expr
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class TLam:
    kind: Kind
    body: Expr
    hint: str = field(default="a", compare=False)


@dataclass(frozen=True)
class App:
    fn: Expr
    arg: Expr


@dataclass(frozen=True)
class TApp:
    fn: Expr
    ty: RType


@dataclass(frozen=True)
class Let:
    bound: Expr
    body: Expr
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Ann:
    sub: Expr
    ty: RType


Expr = Union[Prim, FreeVar, BoundVar, Lam, TLam, App, TApp, Let, Ann]

TRUE = Prim("true")
FALSE = Prim("false")


def int_(n: int) -> Prim:
    return Prim("int", n)


def bool_(b: bool) -> Prim:
    return TRUE if b else FALSE


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class TBool:
    pass


@dataclass(frozen=True)
class TInt:
    pass


@dataclass(frozen=True)
class TVarFree:
    name: Name


@dataclass(frozen=True)
class TVarBound:
    index: int


BaseTy = Union[TBool, TInt, TVarFree, TVarBound]


@dataclass(frozen=True)
class Refn:
    base: BaseTy
    pred: Expr = TRUE
    hint: str = field(default="v", compare=False)


@dataclass(frozen=True)
class Func:
    arg: RType
    res: RType
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Exists:
    bound: RType
    body: RType
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Poly:
    kind: Kind
    body: RType
    hint: str = field(default="a", compare=False)


RType = Union[Refn, Func, Exists, Poly]

BOOL = Refn(TBool())
INT = Refn(TInt())


def is_trivial(t: RType) -> bool:
    return isinstance(t, Refn) and t.pred == TRUE


# ---------------------------------------------------------------- environments


@dataclass(frozen=True)
class TermBind:
    name: Name
    ty: RType


@dataclass(frozen=True)
class TyBind:
    name: Name
    kind: Kind


Binding = Union[TermBind, TyBind]


@dataclass(frozen=True)
class Env:
    """Bindings in binding order: `bindings[0]` is the outermost, the one every later binding may mention."""

    bindings: tuple[Binding, ...] = ()

    def bind(self, name: Name, ty: RType) -> Env:
        return Env(self.bindings + (TermBind(name, ty),))

    def bind_ty(self, name: Name, kind: Kind) -> Env:
        return Env(self.bindings + (TyBind(name, kind),))

    def lookup(self, name: Name) -> RType | None:
        for b in reversed(self.bindings):
            if isinstance(b, TermBind) and b.name == name:
                return b.ty
        return None

    def kind_of(self, name: Name) -> Kind | None:
        for b in reversed(self.bindings):
            if isinstance(b, TyBind) and b.name == name:
                return b.kind
        return None

    def names(self) -> set[Name]:
        return {b.name for b in self.bindings}

    def term_binds(self) -> Iterator[TermBind]:
        return (b for b in self.bindings if isinstance(b, TermBind))

    def __len__(self):
        return len(self.bindings)

    def __iter__(self):
        return iter(self.bindings)


EMPTY = Env()


def env_of(*bindings: Binding) -> Env:
    """Build an environment from bindings listed outermost first."""
    return Env(tuple(bindings))


# ---------------------------------------------------------------- predicates


def is_value(e: Expr) -> bool:
    return isinstance(e, (Prim, FreeVar, Lam, TLam))


# ---------------------------------------------------------------- traversal
#
# A Walker rebuilds terms and types bottom-up. `td` counts enclosing term
# binders and `yd` enclosing type binders, relative to where the walk started.


class Walker:
    def bvar(self, e: BoundVar, td: int, yd: int) -> Expr:
        return e

    def fvar(self, e: FreeVar, td: int, yd: int) -> Expr:
        return e

    def refn(self, t: Refn, pred: Expr, td: int, yd: int) -> RType:
        """Rebuild a refined base type once its predicate has been walked."""
        if pred is t.pred:
            return t
        return Refn(t.base, pred, t.hint)

    def expr(self, e: Expr, td: int = 0, yd: int = 0) -> Expr:
        match e:
            case Prim():
                return e
            case BoundVar():
                return self.bvar(e, td, yd)
            case FreeVar():
                return self.fvar(e, td, yd)
            case Lam(body, hint):
                b = self.expr(body, td + 1, yd)
                return e if b is body else Lam(b, hint)
            case TLam(kind, body, hint):
                b = self.expr(body, td, yd + 1)
                return e if b is body else TLam(kind, b, hint)
            case App(fn, arg):
                f, a = self.expr(fn, td, yd), self.expr(arg, td, yd)
                return e if (f is fn and a is arg) else App(f, a)
            case TApp(fn, ty):
                f, t = self.expr(fn, td, yd), self.ty(ty, td, yd)
                return e if (f is fn and t is ty) else TApp(f, t)
            case Let(bound, body, hint):
                b1, b2 = self.expr(bound, td, yd), self.expr(body, td + 1, yd)
                return e if (b1 is bound and b2 is body) else Let(b1, b2, hint)
            case Ann(sub, ty):
                s, t = self.expr(sub, td, yd), self.ty(ty, td, yd)
                return e if (s is sub and t is ty) else Ann(s, t)
        raise TypeError(f"not an expression: {e!r}")

    def ty(self, t: RType, td: int = 0, yd: int = 0) -> RType:
        match t:
            case Refn(_, pred, _):
                return self.refn(t, self.expr(pred, td + 1, yd), td, yd)
            case Func(arg, res, hint):
                a, r = self.ty(arg, td, yd), self.ty(res, td + 1, yd)
                return t if (a is arg and r is res) else Func(a, r, hint)
            case Exists(bound, body, hint):
                a, r = self.ty(bound, td, yd), self.ty(body, td + 1, yd)
                return t if (a is bound and r is body) else Exists(a, r, hint)
            case Poly(kind, body, hint):
                b = self.ty(body, td, yd + 1)
                return t if b is body else Poly(kind, b, hint)
        raise TypeError(f"not a type: {t!r}")


class Visitor:
    """Read-only counterpart of Walker."""

    def bvar(self, e: BoundVar, td: int, yd: int) -> None:
        pass

    def fvar(self, e: FreeVar, td: int, yd: int) -> None:
        pass

    def base(self, b: BaseTy, td: int, yd: int) -> None:
        pass

    def expr(self, e: Expr, td: int = 0, yd: int = 0) -> None:
        match e:
            case Prim():
                pass
            case BoundVar():
                self.bvar(e, td, yd)
            case FreeVar():
                self.fvar(e, td, yd)
            case Lam(body, _):
                self.expr(body, td + 1, yd)
            case TLam(_, body, _):
                self.expr(body, td, yd + 1)
            case App(fn, arg):
                self.expr(fn, td, yd)
                self.expr(arg, td, yd)
            case TApp(fn, ty):
                self.expr(fn, td, yd)
                self.ty(ty, td, yd)
            case Let(bound, body, _):
                self.expr(bound, td, yd)
                self.expr(body, td + 1, yd)
            case Ann(sub, ty):
                self.expr(sub, td, yd)
                self.ty(ty, td, yd)
            case _:
                raise TypeError(f"not an expression: {e!r}")

    def ty(self, t: RType, td: int = 0, yd: int = 0) -> None:
        match t:
            case Refn(base, pred, _):
                self.base(base, td, yd)
                self.expr(pred, td + 1, yd)
            case Func(arg, res, _) | Exists(arg, res, _):
                self.ty(arg, td, yd)
                self.ty(res, td + 1, yd)
            case Poly(_, body, _):
                self.ty(body, td, yd + 1)
            case _:
                raise TypeError(f"not a type: {t!r}")


# ---------------------------------------------------------------- free names


class _FreeNames(Visitor):
    def __init__(self):
        self.terms: set[Name] = set()
        self.types: set[Name] = set()

    def fvar(self, e, td, yd):
        self.terms.add(e.name)

    def base(self, b, td, yd):
        if isinstance(b, TVarFree):
            self.types.add(b.name)


def _collect(*items: Expr | RType) -> _FreeNames:
    v = _FreeNames()
    for x in items:
        if isinstance(x, (Refn, Func, Exists, Poly)):
            v.ty(x)
        else:
            v.expr(x)
    return v


def fv(e: Expr) -> frozenset[Name]:
    """Free term variables of an expression."""
    return frozenset(_collect(e).terms)


def ftv_expr(e: Expr) -> frozenset[Name]:
    return frozenset(_collect(e).types)


def tfv_type(t: RType) -> frozenset[Name]:
    """Free term variables occurring in a type."""
    return frozenset(_collect(t).terms)


def ftv_type(t: RType) -> frozenset[Name]:
    return frozenset(_collect(t).types)


def env_names(env: Env) -> set[Name]:
    """Every name bound in or mentioned by an environment."""
    out = env.names()
    for b in env.term_binds():
        c = _collect(b.ty)
        out |= c.terms | c.types
    return out


def fresh(used: Iterable[Name], hint: str = "") -> Name:
    return Name(max((n.id for n in used), default=0) + 1, hint)


class NameSupply:
    """Monotone fresh-name generator; one per checking session."""

    def __init__(self, floor: int = 0):
        self.next_id = floor + 1

    def reserve(self, names: Iterable[Name]) -> None:
        top = max((n.id for n in names), default=0)
        if top >= self.next_id:
            self.next_id = top + 1

    def reserve_in(self, *items: Expr | RType | Env) -> None:
        for x in items:
            if isinstance(x, Env):
                self.reserve(env_names(x))
            else:
                c = _collect(x)
                self.reserve(c.terms | c.types)

    def fresh(self, hint: str = "") -> Name:
        n = Name(self.next_id, hint)
        self.next_id += 1
        return n


# ---------------------------------------------------------------- local closure


class _Closure(Visitor):
    def __init__(self):
        self.ok = True

    def bvar(self, e, td, yd):
        if e.index >= td:
            self.ok = False

    def base(self, b, td, yd):
        if isinstance(b, TVarBound) and b.index >= yd:
            self.ok = False


def is_locally_closed(x: Expr | RType, term_depth: int = 0, type_depth: int = 0) -> bool:
    """True when every de Bruijn index is bound (allowing `term_depth`/`type_depth` dangling binders)."""
    v = _Closure()
    if isinstance(x, (Refn, Func, Exists, Poly)):
        v.ty(x, term_depth, type_depth)
    else:
        v.expr(x, term_depth, type_depth)
    return v.ok


# ---------------------------------------------------------------- open / close


class _OpenTerm(Walker):
    def __init__(self, k: int, u: Expr):
        self.k, self.u = k, u

    def bvar(self, e, td, yd):
        return self.u if e.index == self.k + td else e


class _CloseTerm(Walker):
    def __init__(self, k: int, name: Name):
        self.k, self.name = k, name

    def fvar(self, e, td, yd):
        return BoundVar(self.k + td) if e.name == self.name else e


class _OpenTyName(Walker):
    def __init__(self, k: int, name: Name):
        self.k, self.name = k, name

    def refn(self, t, pred, td, yd):
        if isinstance(t.base, TVarBound) and t.base.index == self.k + yd:
            return Refn(TVarFree(self.name), pred, t.hint)
        return super().refn(t, pred, td, yd)


class _CloseTyName(Walker):
    def __init__(self, k: int, name: Name):
        self.k, self.name = k, name

    def refn(self, t, pred, td, yd):
        if isinstance(t.base, TVarFree) and t.base.name == self.name:
            return Refn(TVarBound(self.k + yd), pred, t.hint)
        return super().refn(t, pred, td, yd)


def open_expr(e: Expr, u: Expr | Name, k: int = 0) -> Expr:
    """Replace term index `k` (the innermost binder by default) with `u`."""
    if isinstance(u, Name):
        u = FreeVar(u)
    return _OpenTerm(k, u).expr(e)


def open_type(t: RType, u: Expr | Name, k: int = 0) -> RType:
    if isinstance(u, Name):
        u = FreeVar(u)
    return _OpenTerm(k, u).ty(t)


def open_pred(p: Expr, u: Expr | Name) -> Expr:
    """Instantiate the refinement variable (index 0) of a predicate."""
    return open_expr(p, u, 0)


def close_expr(e: Expr, name: Name, k: int = 0) -> Expr:
    return _CloseTerm(k, name).expr(e)


def close_type(t: RType, name: Name, k: int = 0) -> RType:
    return _CloseTerm(k, name).ty(t)


def open_tyvar(t: RType, name: Name, k: int = 0) -> RType:
    """Replace type index `k` with the free type variable `name`."""
    return _OpenTyName(k, name).ty(t)


def open_tyvar_expr(e: Expr, name: Name, k: int = 0) -> Expr:
    return _OpenTyName(k, name).expr(e)


def close_tyvar(t: RType, name: Name, k: int = 0) -> RType:
    return _CloseTyName(k, name).ty(t)


def close_tyvar_expr(e: Expr, name: Name, k: int = 0) -> Expr:
    return _CloseTyName(k, name).expr(e)


class _Shift(Walker):
    def __init__(self, cutoff: int, by: int):
        self.cutoff, self.by = cutoff, by

    def bvar(self, e, td, yd):
        return BoundVar(e.index + self.by) if e.index >= self.cutoff + td else e


def shift_expr(e: Expr, by: int, cutoff: int = 0) -> Expr:
    """Shift dangling term indices >= cutoff by `by`."""
    return _Shift(cutoff, by).expr(e)


# ---------------------------------------------------------------- small helpers


def mk_and(p: Expr, q: Expr) -> Expr:
    return App(App(Prim("and"), p), q)


def mk_not(p: Expr) -> Expr:
    return App(Prim("not"), p)


def mk_eq(base: BaseTy, a: Expr, b: Expr) -> Expr:
    """Polymorphic equality instantiated at a base type."""
    return App(App(TApp(Prim("eq"), Refn(base)), a), b)


def mk_leq(base: BaseTy, a: Expr, b: Expr) -> Expr:
    return App(App(TApp(Prim("leq"), Refn(base)), a), b)


def conjuncts(p: Expr) -> list[Expr]:
    match p:
        case App(App(Prim("and"), a), b):
            return conjuncts(a) + conjuncts(b)
    return [p]


def size(x: Expr | RType) -> int:
    n = 0

    class _Count(Visitor):
        def expr(self, e, td=0, yd=0):
            nonlocal n
            n += 1
            super().expr(e, td, yd)

        def ty(self, t, td=0, yd=0):
            nonlocal n
            n += 1
            super().ty(t, td, yd)

    if isinstance(x, (Refn, Func, Exists, Poly)):
        _Count().ty(x)
    else:
        _Count().expr(x)
    return n
