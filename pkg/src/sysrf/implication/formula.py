"""Quantifier-free formulas over booleans, linear integer terms and opaque atoms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..syntax import Expr, Name


@dataclass(frozen=True)
class OpaqueTerm:
    """An integer-valued subterm the logic does not interpret; equal terms share a variable."""

    term: Expr


IntVar = Union[Name, OpaqueTerm]


def var_key(v: IntVar):
    if isinstance(v, Name):
        return (0, v.id, "")
    return (1, 0, repr(v.term))


@dataclass(frozen=True)
class LinTerm:
    coeffs: tuple[tuple[IntVar, int], ...] = ()
    const: int = 0

    @staticmethod
    def of(coeffs: dict, const: int = 0) -> LinTerm:
        items = sorted(((v, c) for v, c in coeffs.items() if c), key=lambda vc: var_key(vc[0]))
        return LinTerm(tuple(items), const)

    @staticmethod
    def var(v: IntVar) -> LinTerm:
        return LinTerm(((v, 1),), 0)

    @staticmethod
    def lit(n: int) -> LinTerm:
        return LinTerm((), n)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def __sub__(self, other: LinTerm) -> LinTerm:
        d = self.as_dict()
        for v, c in other.coeffs:
            d[v] = d.get(v, 0) - c
        return LinTerm.of(d, self.const - other.const)

    def eval(self, model: dict) -> int:
        return self.const + sum(c * model[v] for v, c in self.coeffs)

    def vars(self):
        return [v for v, _ in self.coeffs]


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class FTrue(Formula):
    pass


@dataclass(frozen=True)
class FFalse(Formula):
    pass


@dataclass(frozen=True)
class BoolVar(Formula):
    name: Name


@dataclass(frozen=True)
class Opaque(Formula):
    """A boolean subterm treated as an uninterpreted proposition, identified by its structure."""

    fingerprint: Expr


CMPS = ("<=", "<", "=", "!=")


@dataclass(frozen=True)
class Lin(Formula):
    cmp: str
    lhs: LinTerm
    rhs: LinTerm

    def __post_init__(self):
        if self.cmp not in CMPS:
            raise ValueError(f"bad comparison {self.cmp!r}")


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Iff(Formula):
    lhs: Formula
    rhs: Formula


TRUE_F, FALSE_F = FTrue(), FFalse()


def conj(*fs: Formula) -> Formula:
    out = []
    for f in fs:
        if isinstance(f, FFalse):
            return FALSE_F
        if isinstance(f, FTrue):
            continue
        out.extend(f.args if isinstance(f, And) else (f,))
    if not out:
        return TRUE_F
    return out[0] if len(out) == 1 else And(tuple(out))


def disj(*fs: Formula) -> Formula:
    out = []
    for f in fs:
        if isinstance(f, FTrue):
            return TRUE_F
        if isinstance(f, FFalse):
            continue
        out.extend(f.args if isinstance(f, Or) else (f,))
    if not out:
        return FALSE_F
    return out[0] if len(out) == 1 else Or(tuple(out))


def neg(f: Formula) -> Formula:
    if isinstance(f, FTrue):
        return FALSE_F
    if isinstance(f, FFalse):
        return TRUE_F
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def evaluate(f: Formula, model: dict) -> bool:
    """Truth value under a total model (names and opaque fingerprints -> values)."""
    match f:
        case FTrue():
            return True
        case FFalse():
            return False
        case BoolVar(name):
            return bool(model[name])
        case Opaque(fp):
            return bool(model[fp])
        case Lin(cmp, lhs, rhs):
            a, b = lhs.eval(model), rhs.eval(model)
            return {"<=": a <= b, "<": a < b, "=": a == b, "!=": a != b}[cmp]
        case Not(arg):
            return not evaluate(arg, model)
        case And(args):
            return all(evaluate(a, model) for a in args)
        case Or(args):
            return any(evaluate(a, model) for a in args)
        case Iff(lhs, rhs):
            return evaluate(lhs, model) == evaluate(rhs, model)
    raise TypeError(f"not a formula: {f!r}")


def free_symbols(f: Formula) -> tuple[set, set, set]:
    """(boolean names, opaque fingerprints, integer variables) occurring in f."""
    bools, opaques, ints = set(), set(), set()

    def go(g):
        match g:
            case BoolVar(name):
                bools.add(name)
            case Opaque(fp):
                opaques.add(fp)
            case Lin(_, lhs, rhs):
                ints.update(lhs.vars())
                ints.update(rhs.vars())
            case Not(arg):
                go(arg)
            case And(args) | Or(args):
                for a in args:
                    go(a)
            case Iff(lhs, rhs):
                go(lhs)
                go(rhs)

    go(f)
    return bools, opaques, ints
