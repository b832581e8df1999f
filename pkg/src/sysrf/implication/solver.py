"""Satisfiability for boolean combinations of linear integer atoms.

The boolean skeleton is searched by DPLL over a Tseitin clause set. Each
partial assignment of arithmetic atoms is checked for integer feasibility:
equalities with a unit coefficient are solved by substitution, the remaining
inequalities go through Fourier-Motzkin elimination (with gcd tightening),
and a rational witness is repaired by branch and bound. Disequalities are
split lazily, only when the current witness violates one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .formula import (
    And, BoolVar, FFalse, Formula, FTrue, Iff, Lin, Not, Opaque, Or,
)


@dataclass(frozen=True)
class Sat:
    model: dict = field(hash=False, compare=False)


@dataclass(frozen=True)
class Unsat:
    pass


@dataclass(frozen=True)
class Unknown:
    reason: str


SolveResult = Union[Sat, Unsat, Unknown]

MAX_DEPTH = 32
MAX_VARS = 16
MAX_ROWS = 4000


class _GiveUp(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


# ---------------------------------------------------------------- integer feasibility
#
# A row is (coeffs, const) with coeffs a dict var-index -> nonzero int. An
# inequality row means sum + const <= 0, an equality row sum + const = 0.


def _norm_le(co: dict, c: int):
    co = {v: a for v, a in co.items() if a}
    if not co:
        return None if c <= 0 else False
    g = math.gcd(*co.values())
    if g > 1:
        co = {v: a // g for v, a in co.items()}
        c = -((-c) // g)  # ceil(c / g)
    return co, c


def _norm_eq(co: dict, c: int):
    co = {v: a for v, a in co.items() if a}
    if not co:
        return None if c == 0 else False
    g = math.gcd(*co.values())
    if c % g:
        return False
    co = {v: a // g for v, a in co.items()}
    c //= g
    if co[min(co)] < 0:
        co = {v: -a for v, a in co.items()}
        c = -c
    return co, c


def _substitute(co: dict, c: int, x: int, sol: dict, sc: int):
    """Replace x by (sum sol + sc) in the row (co, c)."""
    a = co.get(x)
    if not a:
        return co, c
    out = {v: b for v, b in co.items() if v != x}
    for v, b in sol.items():
        out[v] = out.get(v, 0) + a * b
    return out, c + a * sc


def _row_value(co: dict, c, model: dict):
    return c + sum(a * model.get(v, 0) for v, a in co.items())


class _Lia:
    def __init__(self, max_depth: int = MAX_DEPTH, max_vars: int = MAX_VARS):
        self.max_depth = max_depth
        self.max_vars = max_vars

    def check(self, les: list, eqs: list, neqs: list, depth: int = 0):
        """An integer model (dict) or None when infeasible; raises _GiveUp."""
        model = self.feasible(les, eqs, depth)
        if model is None:
            return None
        for i, (co, c) in enumerate(neqs):
            if _row_value(co, c, model) != 0:
                continue
            if depth >= self.max_depth:
                raise _GiveUp("disequality splitting depth exhausted")
            rest = neqs[:i] + neqs[i + 1:]
            below = self.check(les + [(co, c + 1)], eqs, rest, depth + 1)
            if below is not None:
                return below
            neg = {v: -a for v, a in co.items()}
            return self.check(les + [(neg, 1 - c)], eqs, rest, depth + 1)
        return model

    def feasible(self, les: list, eqs: list, depth: int):
        rows = []
        for co, c in les:
            r = _norm_le(co, c)
            if r is False:
                return None
            if r is not None:
                rows.append(r)
        pending = []
        for co, c in eqs:
            r = _norm_eq(co, c)
            if r is False:
                return None
            if r is not None:
                pending.append(r)

        # solve equalities with a unit coefficient by substitution
        solved = []
        while pending:
            co, c = pending.pop()
            r = _norm_eq(co, c)
            if r is False:
                return None
            if r is None:
                continue
            co, c = r
            unit = next((v for v in sorted(co) if abs(co[v]) == 1), None)
            if unit is None:
                rows.append((co, c))
                rows.append(({v: -a for v, a in co.items()}, -c))
                continue
            a = co[unit]
            # unit = -(c + rest) / a
            sol = {v: -b * a for v, b in co.items() if v != unit}
            sc = -c * a
            solved.append((unit, sol, sc))
            pending = [_substitute(pc, pk, unit, sol, sc) for pc, pk in pending]
            rows = [_substitute(rc, rk, unit, sol, sc) for rc, rk in rows]
            fixed = []
            for rc, rk in rows:
                r = _norm_le(rc, rk)
                if r is False:
                    return None
                if r is not None:
                    fixed.append(r)
            rows = fixed

        model = self._bnb(rows, depth)
        if model is None:
            return None
        for unit, sol, sc in reversed(solved):
            model[unit] = sc + sum(b * model.get(v, 0) for v, b in sol.items())
        return model

    def _bnb(self, rows: list, depth: int):
        variables = sorted({v for co, _ in rows for v in co})
        if len(variables) > self.max_vars:
            raise _GiveUp(f"{len(variables)} integer variables exceed the elimination limit")
        rational = _fourier_motzkin(rows)
        if rational is None:
            return None
        frac = next((v for v in variables if rational.get(v, 0).denominator != 1), None)
        if frac is None:
            return {v: int(rational.get(v, 0)) for v in variables}
        if depth >= self.max_depth:
            raise _GiveUp("branch-and-bound depth exhausted")
        val = rational[frac]
        lo = self._bnb(rows + [({frac: 1}, -math.floor(val))], depth + 1)
        if lo is not None:
            return lo
        return self._bnb(rows + [({frac: -1}, math.ceil(val))], depth + 1)


def _fourier_motzkin(rows: list):
    """A rational model of the inequality rows, or None when they are infeasible."""
    current = _dedupe(rows)
    if current is None:
        return None
    levels = []
    while True:
        variables = {v for co, _ in current for v in co}
        if not variables:
            break

        def cost(v):
            p = sum(1 for co, _ in current if co.get(v, 0) > 0)
            n = sum(1 for co, _ in current if co.get(v, 0) < 0)
            return (p * n - p - n, v)

        x = min(variables, key=cost)
        pos = [r for r in current if r[0].get(x, 0) > 0]
        neg = [r for r in current if r[0].get(x, 0) < 0]
        rest = [r for r in current if x not in r[0]]
        levels.append((x, pos + neg))
        combined = []
        for pc, pk in pos:
            a = pc[x]
            for nc, nk in neg:
                b = -nc[x]
                co = {}
                for v, k in pc.items():
                    co[v] = co.get(v, 0) + b * k
                for v, k in nc.items():
                    co[v] = co.get(v, 0) + a * k
                co.pop(x, None)
                combined.append((co, b * pk + a * nk))
        current = _dedupe(rest + combined)
        if current is None:
            return None
        if len(current) > MAX_ROWS:
            raise _GiveUp("Fourier-Motzkin row blow-up")

    model: dict = {}
    for x, cons in reversed(levels):
        lo, hi = None, None
        for co, c in cons:
            a = co[x]
            for v in co:
                # a variable that cancelled out during elimination is unconstrained
                if v != x and v not in model:
                    model[v] = Fraction(0)
            rest = c + sum(k * model[v] for v, k in co.items() if v != x)
            bound = Fraction(-rest, a)
            if a > 0:
                hi = bound if hi is None else min(hi, bound)
            else:
                lo = bound if lo is None else max(lo, bound)
        model[x] = _pick(lo, hi)
    return model


def _pick(lo, hi) -> Fraction:
    """An integer in [lo, hi] closest to zero if one exists, else an endpoint."""
    ilo = None if lo is None else math.ceil(lo)
    ihi = None if hi is None else math.floor(hi)
    if ilo is not None and ihi is not None and ilo > ihi:
        return lo
    if ilo is not None and ilo > 0:
        return Fraction(ilo)
    if ihi is not None and ihi < 0:
        return Fraction(ihi)
    return Fraction(0)


def _dedupe(rows: list):
    best: dict = {}
    for co, c in rows:
        r = _norm_le(co, c)
        if r is False:
            return None
        if r is None:
            continue
        co, c = r
        key = tuple(sorted(co.items()))
        if key not in best or c > best[key]:
            best[key] = c
    return [(dict(k), c) for k, c in best.items()]


# ---------------------------------------------------------------- boolean skeleton


class _Atoms:
    """Numbering of propositional atoms; arithmetic atoms are canonicalised."""

    def __init__(self):
        self.ids: dict = {}
        self.payload: list = [None]  # index 0 unused
        self.int_vars: dict = {}

    def new_aux(self) -> int:
        self.payload.append(("aux",))
        return len(self.payload) - 1

    def _intern(self, key, payload) -> int:
        if key not in self.ids:
            self.payload.append(payload)
            self.ids[key] = len(self.payload) - 1
        return self.ids[key]

    def ivar(self, v) -> int:
        if v not in self.int_vars:
            self.int_vars[v] = len(self.int_vars)
        return self.int_vars[v]

    def literal(self, f: Formula):
        """A signed atom id, or True/False for atoms that fold to a constant."""
        match f:
            case BoolVar(name):
                return self._intern(("b", name), ("bool", name))
            case Opaque(fp):
                return self._intern(("o", fp), ("opaque", fp))
            case Lin(cmp, lhs, rhs):
                d = lhs - rhs
                co = {self.ivar(v): a for v, a in d.coeffs}
                c = d.const
                if cmp == "<":
                    c += 1
                if cmp in ("<=", "<"):
                    r = _norm_le(co, c)
                    kind = "le"
                else:
                    r = _norm_eq(co, c)
                    kind = "eq"
                if r is None or r is False:
                    truth = r is None
                    return truth if cmp != "!=" else not truth
                co, c = r
                key = (kind, tuple(sorted(co.items())), c)
                lit = self._intern(key, key)
                return -lit if cmp == "!=" else lit
        raise TypeError(f"not an atom: {f!r}")


class _Cnf:
    def __init__(self):
        self.atoms = _Atoms()
        self.clauses: list[list[int]] = []
        self.memo: dict = {}

    def add_root(self, f: Formula) -> bool:
        """Assert f; returns False if it is trivially unsatisfiable."""
        if isinstance(f, And):
            return all(self.add_root(a) for a in f.args)
        lit = self.lit(f)
        if lit is True:
            return True
        if lit is False:
            return False
        self.clauses.append([lit])
        return True

    def lit(self, f: Formula):
        match f:
            case FTrue():
                return True
            case FFalse():
                return False
            case Not(arg):
                a = self.lit(arg)
                return (not a) if isinstance(a, bool) else -a
            case BoolVar() | Opaque() | Lin():
                return self.atoms.literal(f)
        key = f
        if key in self.memo:
            return self.memo[key]
        out = self._gate(f)
        self.memo[key] = out
        return out

    def _gate(self, f: Formula):
        match f:
            case And(args) | Or(args):
                is_and = isinstance(f, And)
                lits = []
                for a in args:
                    la = self.lit(a)
                    if isinstance(la, bool):
                        if la != is_and:  # false in a conjunction, true in a disjunction
                            return la
                        continue
                    lits.append(la)
                if not lits:
                    return is_and
                if len(lits) == 1:
                    return lits[0]
                t = self.atoms.new_aux()
                if is_and:
                    for la in lits:
                        self.clauses.append([-t, la])
                    self.clauses.append([t] + [-la for la in lits])
                else:
                    for la in lits:
                        self.clauses.append([t, -la])
                    self.clauses.append([-t] + lits)
                return t
            case Iff(lhs, rhs):
                a, b = self.lit(lhs), self.lit(rhs)
                if isinstance(a, bool) and isinstance(b, bool):
                    return a == b
                if isinstance(a, bool):
                    return b if a else -b
                if isinstance(b, bool):
                    return a if b else -a
                t = self.atoms.new_aux()
                self.clauses += [[-t, -a, b], [-t, a, -b], [t, a, b], [t, -a, -b]]
                return t
        raise TypeError(f"not a formula: {f!r}")


class _Search:
    def __init__(self, cnf: _Cnf, lia: _Lia):
        self.cnf = cnf
        self.lia = lia
        self.payload = cnf.atoms.payload
        self.unknown: str | None = None
        self.theory_cache: dict = {}

    def _propagate(self, assign: dict) -> bool:
        changed = True
        while changed:
            changed = False
            for clause in self.cnf.clauses:
                free = None
                n_free = 0
                sat = False
                for lit in clause:
                    val = assign.get(abs(lit))
                    if val is None:
                        n_free += 1
                        free = lit
                    elif val == (lit > 0):
                        sat = True
                        break
                if sat:
                    continue
                if n_free == 0:
                    return False
                if n_free == 1:
                    assign[abs(free)] = free > 0
                    changed = True
        return True

    def _theory(self, assign: dict):
        les, eqs, neqs = [], [], []
        key = []
        for atom, val in assign.items():
            p = self.payload[atom]
            if p[0] not in ("le", "eq"):
                continue
            key.append((atom, val))
            kind, co, c = p
            co = dict(co)
            if kind == "le":
                if val:
                    les.append((co, c))
                else:
                    les.append(({v: -a for v, a in co.items()}, 1 - c))
            elif val:
                eqs.append((co, c))
            else:
                neqs.append((co, c))
        key = frozenset(key)
        if key in self.theory_cache:
            return self.theory_cache[key]
        try:
            out = self.lia.check(les, eqs, neqs)
        except _GiveUp as g:
            out = _GiveUp(g.reason)
        self.theory_cache[key] = out
        return out

    def _pick(self, assign: dict):
        for clause in self.cnf.clauses:
            free = None
            for lit in clause:
                val = assign.get(abs(lit))
                if val is None:
                    free = free or lit
                elif val == (lit > 0):
                    free = None
                    break
            else:
                if free is not None:
                    return free
        return None

    def run(self, assign: dict):
        if not self._propagate(assign):
            return None
        theory = self._theory(assign)
        if theory is None:
            return None
        lit = self._pick(assign)
        if lit is None:
            if isinstance(theory, _GiveUp):
                self.unknown = theory.reason
                return None
            return assign, theory
        for val in (lit > 0, lit < 0):
            trial = dict(assign)
            trial[abs(lit)] = val
            found = self.run(trial)
            if found is not None:
                return found
        return None


def solve(f: Formula, max_depth: int = MAX_DEPTH, max_vars: int = MAX_VARS) -> SolveResult:
    """Decide satisfiability of a quantifier-free formula."""
    cnf = _Cnf()
    if not cnf.add_root(f):
        return Unsat()
    search = _Search(cnf, _Lia(max_depth, max_vars))
    try:
        found = search.run({})
    except RecursionError:
        return Unknown("boolean search too deep")
    if found is None:
        return Unknown(search.unknown) if search.unknown else Unsat()
    assign, ints = found
    model: dict = {}
    for atom, p in enumerate(cnf.atoms.payload):
        if p is None or p[0] not in ("bool", "opaque"):
            continue
        model[p[1]] = assign.get(atom, False)
    for v, idx in cnf.atoms.int_vars.items():
        model[v] = ints.get(idx, 0)
    return Sat(model)
