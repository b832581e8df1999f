"""Surface syntax trees as written by users; every node remembers where it came from."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..diagnostics import Span
from ..syntax import Kind, Name

_NOSPAN = Span(0, 0, 0, 0)


def _span():
    return field(default=_NOSPAN, compare=False, repr=False)


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class STBase:
    name: str  # "Int", "Bool" or a type variable
    span: Span = _span()


@dataclass(frozen=True)
class STRefn:
    base: STBase
    var: str
    pred: SExpr
    span: Span = _span()


@dataclass(frozen=True)
class STFunc:
    param: Optional[str]
    arg: SType
    res: SType
    span: Span = _span()


@dataclass(frozen=True)
class STExists:
    param: str
    bound: SType
    body: SType
    span: Span = _span()


@dataclass(frozen=True)
class STPoly:
    param: str
    kind: Kind
    body: SType
    span: Span = _span()


SType = Union[STBase, STRefn, STFunc, STExists, STPoly]


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class SInt:
    value: int
    span: Span = _span()


@dataclass(frozen=True)
class SBool:
    value: bool
    span: Span = _span()


@dataclass(frozen=True)
class SVar:
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class SFree:
    """A free name written with its identity, e.g. `x$3`."""

    name: Name
    span: Span = _span()


@dataclass(frozen=True)
class SPrim:
    tag: str
    arg: Optional[int] = None
    span: Span = _span()


@dataclass(frozen=True)
class SLam:
    param: str
    body: SExpr
    span: Span = _span()


@dataclass(frozen=True)
class STLam:
    param: str
    kind: Kind
    body: SExpr
    span: Span = _span()


@dataclass(frozen=True)
class SApp:
    fn: SExpr
    arg: SExpr
    span: Span = _span()


@dataclass(frozen=True)
class STyApp:
    fn: SExpr
    ty: SType
    span: Span = _span()


@dataclass(frozen=True)
class SLet:
    name: str
    bound: SExpr
    body: SExpr
    span: Span = _span()


@dataclass(frozen=True)
class SAnn:
    expr: SExpr
    ty: SType
    span: Span = _span()


@dataclass(frozen=True)
class SBin:
    op: str  # && || <=> <= == < != >= >
    lhs: SExpr
    rhs: SExpr
    span: Span = _span()


@dataclass(frozen=True)
class SNot:
    arg: SExpr
    span: Span = _span()


SExpr = Union[SInt, SBool, SVar, SFree, SPrim, SLam, STLam, SApp, STyApp, SLet, SAnn, SBin, SNot]


# ---------------------------------------------------------------- programs


@dataclass(frozen=True)
class Definition:
    name: str
    signature: SType
    body: SExpr
    span: Span = _span()


@dataclass(frozen=True)
class Program:
    defs: tuple[Definition, ...]
    main: Optional[SExpr] = None
    file: str = "<input>"
