"""The builtin solver against brute-force enumeration on a small box."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from ..implication.formula import (
    CMPS, And, BoolVar, Formula, Iff, Lin, LinTerm, Not, Or, conj, evaluate,
)
from ..implication.solver import Sat, Unknown, Unsat, solve
from ..syntax import Name

BOX = range(-3, 4)


@dataclass
class SolverReport:
    formulas: int = 0
    solves: int = 0
    sat: int = 0
    unsat: int = 0
    unknown: int = 0
    disagreements: list[str] = field(default_factory=list)

    @property
    def unknown_rate(self) -> float:
        return self.unknown / max(1, self.solves)

    def as_dict(self) -> dict:
        return {
            "formulas": self.formulas, "solves": self.solves, "sat": self.sat, "unsat": self.unsat,
            "unknown": self.unknown, "unknownRate": self.unknown_rate,
            "disagreements": list(self.disagreements),
        }


def random_formula(rng: random.Random, ints: list[Name], bools: list[Name], depth: int = 3) -> Formula:
    if depth <= 0 or rng.random() < 0.3:
        if bools and rng.random() < 0.2:
            return BoolVar(rng.choice(bools))
        k = rng.randint(1, min(3, len(ints)))
        lhs = LinTerm.of({v: rng.choice([-3, -2, -1, 1, 2, 3]) for v in rng.sample(ints, k)}, rng.randint(-4, 4))
        rhs = LinTerm.lit(rng.randint(-4, 4))
        return Lin(rng.choice(CMPS), lhs, rhs)
    match rng.randrange(4):
        case 0:
            return Not(random_formula(rng, ints, bools, depth - 1))
        case 1:
            return And(tuple(random_formula(rng, ints, bools, depth - 1) for _ in range(rng.randint(2, 3))))
        case 2:
            return Or(tuple(random_formula(rng, ints, bools, depth - 1) for _ in range(rng.randint(2, 3))))
    return Iff(random_formula(rng, ints, bools, depth - 1), random_formula(rng, ints, bools, depth - 1))


def box(ints: list[Name]) -> Formula:
    lo, hi = LinTerm.lit(BOX.start), LinTerm.lit(BOX.stop - 1)
    return conj(*(f for v in ints for f in (Lin("<=", lo, LinTerm.var(v)), Lin("<=", LinTerm.var(v), hi))))


def enumerate_models(f: Formula, ints: list[Name], bools: list[Name]):
    for iv in itertools.product(BOX, repeat=len(ints)):
        for bv in itertools.product((False, True), repeat=len(bools)):
            model = dict(zip(ints, iv)) | dict(zip(bools, bv))
            if evaluate(f, model):
                yield model


def _total(model: dict, ints, bools) -> dict:
    # variables the solver never had to constrain may be missing
    return {v: 0 for v in ints} | {b: False for b in bools} | model


def solver_run(n: int = 2000, seed: int = 42) -> SolverReport:
    """Each formula is solved twice: as is, and confined to the box.

    Unconfined: Unsat must leave no model in the box and a Sat model must
    satisfy the formula. Confined: the verdict must match enumeration exactly.
    """
    rng = random.Random(seed)
    rep = SolverReport()
    for i in range(n):
        k = rng.randint(1, 4)
        ints = [Name(10 * i + j + 1, f"x{j}") for j in range(k)]
        bools = [Name(10 * i + 5 + j, f"b{j}") for j in range(rng.randint(0, 2))]
        f = random_formula(rng, ints, bools)
        witness = next(enumerate_models(f, ints, bools), None)
        rep.formulas += 1
        free = solve(f)
        boxed = solve(conj(f, box(ints)))
        for label, res in (("free", free), ("boxed", boxed)):
            rep.solves += 1
            match res:
                case Unknown():
                    rep.unknown += 1
                case Unsat():
                    rep.unsat += 1
                    if witness is not None:
                        rep.disagreements.append(f"{label} Unsat but {witness} satisfies {f!r}")
                case Sat(model):
                    rep.sat += 1
                    if not evaluate(f, _total(model, ints, bools)):
                        rep.disagreements.append(f"{label} model {model} does not satisfy {f!r}")
                    if label == "boxed" and witness is None:
                        rep.disagreements.append(f"boxed Sat but enumeration finds no model of {f!r}")
    return rep
