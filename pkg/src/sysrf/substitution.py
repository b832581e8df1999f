"""Substitution of values for term variables and of types for type variables."""

from __future__ import annotations

from .syntax import (
    TRUE, Exists, Expr, Name, RType, Refn, TVarBound, TVarFree, Walker,
    is_locally_closed, is_value, mk_and, shift_expr,
)


class SubstitutionError(ValueError):
    pass


def _check_value(v: Expr) -> None:
    if not is_value(v):
        raise SubstitutionError(f"can only substitute values, got {v!r}")
    if not is_locally_closed(v):
        raise SubstitutionError(f"substituted value has dangling indices: {v!r}")


class _SubFV(Walker):
    def __init__(self, x: Name, v: Expr):
        self.x, self.v = x, v

    def fvar(self, e, td, yd):
        return self.v if e.name == self.x else e


def subFV(x: Name, v: Expr, e: Expr) -> Expr:
    """e[v/x] for a value v."""
    _check_value(v)
    return _SubFV(x, v).expr(e)


def tsubFV(x: Name, v: Expr, t: RType) -> RType:
    _check_value(v)
    return _SubFV(x, v).ty(t)


def strengthen(t: RType, p: Expr) -> RType:
    """Conjoin `p` (a predicate over index 0) onto the top-level refinement of `t`."""
    match t:
        case Refn(base, q, hint):
            # trivial conjuncts are dropped so instantiating at a plain base stays plain
            if p == TRUE:
                return t
            return Refn(base, p if q == TRUE else mk_and(p, q), hint)
        case Exists(bound, body, hint):
            # under the witness binder, p's outer references move up by one
            return Exists(bound, strengthen(body, shift_expr(p, 1, cutoff=1)), hint)
    return t


class _SubTyVar(Walker):
    def __init__(self, hit, replacement: RType):
        self.hit, self.replacement = hit, replacement

    def refn(self, t, pred, td, yd):
        if self.hit(t.base, yd):
            return strengthen(self.replacement, pred)
        return super().refn(t, pred, td, yd)


def _free_hit(alpha: Name):
    return lambda b, yd: isinstance(b, TVarFree) and b.name == alpha


def _bound_hit(k: int):
    return lambda b, yd: isinstance(b, TVarBound) and b.index == k + yd


def _check_type_arg(t: RType) -> None:
    if not is_locally_closed(t):
        raise SubstitutionError(f"substituted type has dangling indices: {t!r}")


def tsubFTV(alpha: Name, t_alpha: RType, t: RType) -> RType:
    """t[t_alpha/alpha], strengthening refined occurrences of alpha."""
    _check_type_arg(t_alpha)
    return _SubTyVar(_free_hit(alpha), t_alpha).ty(t)


def subFTV(alpha: Name, t_alpha: RType, e: Expr) -> Expr:
    _check_type_arg(t_alpha)
    return _SubTyVar(_free_hit(alpha), t_alpha).expr(e)


def open_tyvar_with(t: RType, t_alpha: RType, k: int = 0) -> RType:
    """Instantiate the type binder at index `k` with a type (T-TApp)."""
    _check_type_arg(t_alpha)
    return _SubTyVar(_bound_hit(k), t_alpha).ty(t)


def open_tyvar_with_expr(e: Expr, t_alpha: RType, k: int = 0) -> Expr:
    """Instantiate the type binder at index `k` inside a term (E-TAppAbs)."""
    _check_type_arg(t_alpha)
    return _SubTyVar(_bound_hit(k), t_alpha).expr(e)

