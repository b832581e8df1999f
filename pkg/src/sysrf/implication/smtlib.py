"""SMT-LIB2 rendering of implication queries."""

from __future__ import annotations

import re

from ..syntax import Name
from .formula import (
    And, BoolVar, FFalse, Formula, FTrue, Iff, Lin, LinTerm, Not, Opaque,
    OpaqueTerm, Or, free_symbols, var_key,
)


class _Names:
    def __init__(self):
        self.table: dict = {}
        self.taken: set = set()
        self.notes: list[tuple[str, object]] = []

    def _claim(self, base: str) -> str:
        name, k = base, 1
        while name in self.taken:
            k += 1
            name = f"{base}_{k}"
        self.taken.add(name)
        return name

    def of(self, key) -> str:
        if key in self.table:
            return self.table[key]
        if isinstance(key, Name):
            hint = re.sub(r"[^A-Za-z0-9_]", "_", key.hint or "n")
            name = self._claim(f"{hint}_{key.id}")
        else:
            term = key.term if isinstance(key, OpaqueTerm) else key
            name = self._claim(f"opq{len(self.notes) + 1}")
            self.notes.append((name, term))
        self.table[key] = name
        return name


def _num(n: int) -> str:
    return str(n) if n >= 0 else f"(- {-n})"


def _lin(t: LinTerm, names: _Names) -> str:
    parts = []
    for v, c in t.coeffs:
        parts.append(names.of(v) if c == 1 else f"(* {_num(c)} {names.of(v)})")
    if t.const or not parts:
        parts.append(_num(t.const))
    return parts[0] if len(parts) == 1 else f"(+ {' '.join(parts)})"


def render(f: Formula, names: _Names) -> str:
    match f:
        case FTrue():
            return "true"
        case FFalse():
            return "false"
        case BoolVar(name):
            return names.of(name)
        case Opaque(fp):
            return names.of(fp)
        case Lin(cmp, lhs, rhs):
            a, b = _lin(lhs, names), _lin(rhs, names)
            if cmp == "!=":
                return f"(not (= {a} {b}))"
            return f"({cmp} {a} {b})"
        case Not(arg):
            return f"(not {render(arg, names)})"
        case And(args):
            return f"(and {' '.join(render(a, names) for a in args)})"
        case Or(args):
            return f"(or {' '.join(render(a, names) for a in args)})"
        case Iff(lhs, rhs):
            return f"(= {render(lhs, names)} {render(rhs, names)})"
    raise TypeError(f"not a formula: {f!r}")


def script(assumptions: list[Formula], p: Formula, q: Formula, show=repr) -> str:
    """A QF_UFLIA script that is unsat exactly when the assumptions and p entail q."""
    names = _Names()
    body = [f"(assert {render(a, names)})" for a in assumptions]
    body.append(f"(assert {render(p, names)})")
    body.append(f"(assert (not {render(q, names)}))")

    bools, opaques, ints = set(), set(), set()
    for g in [*assumptions, p, q]:
        b, o, i = free_symbols(g)
        bools |= b
        opaques |= o
        ints |= i
    decls = []
    for n in sorted(bools, key=lambda n: n.id):
        decls.append(f"(declare-const {names.of(n)} Bool)")
    for fp in sorted(opaques, key=repr):
        decls.append(f"(declare-const {names.of(fp)} Bool)")
    for v in sorted(ints, key=var_key):
        decls.append(f"(declare-const {names.of(v)} Int)")
    lines = ["(set-logic QF_UFLIA)"]
    lines += [f"; {name} stands for {show(term)}" for name, term in names.notes]
    lines += decls + body + ["(check-sat)"]
    return "\n".join(lines) + "\n"

