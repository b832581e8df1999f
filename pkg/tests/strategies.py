"""Hypothesis strategies for locally closed terms and types."""

from hypothesis import strategies as st

from sysrf.syntax import (
    Ann, App, BoundVar, Exists, FreeVar, Func, Kind, Lam, Let, Name, Poly, Prim,
    Refn, TApp, TBool, TInt, TLam, TVarBound, TVarFree, bool_, int_,
)

NAMES = [Name(i, h) for i, h in ((1, "x"), (2, "y"), (3, "z"))]
TYNAMES = [Name(11, "a"), Name(12, "b")]

prims = st.one_of(
    st.integers(-5, 5).map(int_),
    st.booleans().map(bool_),
    st.sampled_from(["and", "or", "not", "iff", "leq", "eq", "leq_int", "eq_int", "leq_bool"]).map(Prim),
    st.tuples(st.sampled_from(["leqN", "eqN"]), st.integers(-3, 3)).map(lambda p: Prim(*p)),
)


def bases(tscope: int):
    opts = [st.just(TInt()), st.just(TBool()), st.sampled_from(TYNAMES).map(TVarFree)]
    if tscope:
        opts.append(st.integers(0, tscope - 1).map(TVarBound))
    return st.one_of(*opts)


@st.composite
def exprs(draw, scope: int = 0, tscope: int = 0, depth: int = 4, free: bool = True):
    leaves = [prims]
    if free:
        leaves.append(st.sampled_from(NAMES).map(FreeVar))
    if scope:
        leaves.append(st.integers(0, scope - 1).map(BoundVar))
    if depth <= 0 or draw(st.integers(0, 3)) == 0:
        return draw(st.one_of(*leaves))
    k = draw(st.integers(0, 6))
    sub = lambda s=scope, t=tscope: exprs(s, t, depth - 1, free)  # noqa: E731
    match k:
        case 0:
            return Lam(draw(sub(scope + 1)))
        case 1:
            return TLam(draw(st.sampled_from(list(Kind))), draw(sub(scope, tscope + 1)))
        case 2 | 3:
            return App(draw(sub()), draw(sub()))
        case 4:
            return TApp(draw(sub()), draw(types(scope, tscope, depth - 1, free)))
        case 5:
            return Let(draw(sub()), draw(sub(scope + 1)))
    return Ann(draw(sub()), draw(types(scope, tscope, depth - 1, free)))


@st.composite
def types(draw, scope: int = 0, tscope: int = 0, depth: int = 3, free: bool = True):
    if depth <= 0 or draw(st.integers(0, 2)) == 0:
        base = draw(bases(tscope))
        pred = draw(exprs(scope + 1, tscope, min(depth, 2), free))
        return Refn(base, pred)
    k = draw(st.integers(0, 2))
    arg = draw(types(scope, tscope, depth - 1, free))
    match k:
        case 0:
            return Func(arg, draw(types(scope + 1, tscope, depth - 1, free)))
        case 1:
            return Exists(arg, draw(types(scope + 1, tscope, depth - 1, free)))
    return Poly(draw(st.sampled_from(list(Kind))), draw(types(scope, tscope + 1, depth - 1, free)))


values = st.one_of(prims, st.sampled_from(NAMES).map(FreeVar), exprs(1, 0, 2).map(Lam))
