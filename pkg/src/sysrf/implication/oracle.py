"""Implication queries and the oracles that decide them."""

from __future__ import annotations

import os
import shlex
import subprocess
from dataclasses import dataclass, field
from typing import Union

from ..syntax import TRUE, Env, Expr, NameSupply, conjuncts
from .encode import Encoder, env_assumptions
from .formula import Formula, conj, neg
from .smtlib import script
from .solver import Sat, Unsat, solve


@dataclass(frozen=True)
class Valid:
    pass


@dataclass(frozen=True)
class Invalid:
    model: dict = field(default_factory=dict, hash=False, compare=False)


@dataclass(frozen=True)
class Unknown:
    reason: str


Verdict = Union[Valid, Invalid, Unknown]


@dataclass
class Query:
    """Γ ⊢ p ⇒ q, together with its encoding."""

    env: Env
    p: Expr
    q: Expr
    assumptions: list[Formula]
    fp: Formula
    fq: Formula

    def negation(self) -> Formula:
        return conj(*self.assumptions, self.fp, neg(self.fq))

    def smtlib(self, show=repr) -> str:
        return script(self.assumptions, self.fp, self.fq, show)


def make_query(env: Env, p: Expr, q: Expr) -> Query:
    supply = NameSupply()
    supply.reserve_in(env, p, q)
    assumptions, delta = env_assumptions(env, supply)
    enc = Encoder(delta)
    return Query(env, p, q, assumptions, enc.encode(p), enc.encode(q))


class OracleError(RuntimeError):
    pass


class Oracle:
    """Decides implication queries; subclasses choose the procedure."""

    def decide(self, query: Query) -> Verdict:
        raise NotImplementedError

    def check_impl(self, env: Env, p: Expr, q: Expr) -> tuple[Verdict, Query]:
        query = make_query(env, p, q)
        return self.decide(query), query


class BuiltinOracle(Oracle):
    def __init__(self, max_depth: int | None = None, max_vars: int | None = None):
        self.limits = {k: v for k, v in (("max_depth", max_depth), ("max_vars", max_vars)) if v}
        self.cache: dict = {}
        self.queries = 0

    def decide(self, query: Query) -> Verdict:
        self.queries += 1
        if query.q == TRUE or query.q in conjuncts(query.p):
            return Valid()
        phi = query.negation()
        if phi in self.cache:
            return self.cache[phi]
        r = solve(phi, **self.limits)
        if isinstance(r, Unsat):
            out: Verdict = Valid()
        elif isinstance(r, Sat):
            out = Invalid(r.model)
        else:
            out = Unknown(r.reason)
        self.cache[phi] = out
        return out


class ExternalOracle(Oracle):
    """Pipes each query to an SMT-LIB2 solver command (default: $RF_SMT_CMD)."""

    def __init__(self, command: str | None = None, timeout: float = 30.0):
        command = command or os.environ.get("RF_SMT_CMD")
        if not command:
            raise OracleError("no external solver: set RF_SMT_CMD, e.g. RF_SMT_CMD='z3 -in'")
        self.argv = shlex.split(command)
        self.timeout = timeout

    def decide(self, query: Query) -> Verdict:
        try:
            proc = subprocess.run(
                self.argv, input=query.smtlib(), capture_output=True, text=True, timeout=self.timeout
            )
        except (OSError, subprocess.TimeoutExpired) as err:
            return Unknown(f"external solver failed: {err}")
        answer = proc.stdout.strip().split("\n")[0].strip() if proc.stdout else ""
        if answer == "unsat":
            return Valid()
        if answer == "sat":
            return Invalid()
        return Unknown(f"external solver answered {answer or proc.stderr.strip()!r}")


class RecordingOracle(Oracle):
    """Delegates to another oracle and keeps every query it sees."""

    def __init__(self, inner: Oracle):
        self.inner = inner
        self.log: list[tuple[Query, Verdict]] = []

    def decide(self, query: Query) -> Verdict:
        v = self.inner.decide(query)
        self.log.append((query, v))
        return v


_DEFAULT = BuiltinOracle()


def check_impl(env: Env, p: Expr, q: Expr, oracle: Oracle | None = None) -> Verdict:
    """Does Γ ⊢ p ⇒ q hold? Unknown means the procedure gave up, not that it fails."""
    return (oracle or _DEFAULT).check_impl(env, p, q)[0]


def emit_smtlib(env: Env, p: Expr, q: Expr, show=repr) -> str:
    return make_query(env, p, q).smtlib(show)
