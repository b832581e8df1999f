"""Surface syntax: parsing, elaboration to the core, and printing."""

from __future__ import annotations

from ..syntax import Env, Expr, RType
from .elab import (
    ElaboratedDef, ElaboratedProgram, Elaborator, RejectedExistentialAnnotation,
    Scope, elaborate_program, itype_of,
)
from .parser import parse_program as parse_surface_program
from .parser import parse_surface_expr, parse_surface_type
from .pretty import pretty, pretty_env, pretty_query, show_name


def parse_expr(text: str, env: Env | None = None, expected: RType | None = None) -> Expr:
    """Parse and elaborate a closed-up-to-env expression."""
    el = Elaborator(env)
    want = None if expected is None else itype_of(expected)
    e, _ = el.expr(parse_surface_expr(text), Scope(), want)
    return el.finish(e)


def parse_type(text: str, env: Env | None = None, allow_exists: bool = True) -> RType:
    el = Elaborator(env, allow_exists=allow_exists)
    t, _ = el.type(parse_surface_type(text), Scope())
    return el.finish(t)


def parse_program(text: str, file: str = "<input>") -> ElaboratedProgram:
    return elaborate_program(parse_surface_program(text, file))


__all__ = [
    "ElaboratedDef", "ElaboratedProgram", "Elaborator", "RejectedExistentialAnnotation",
    "parse_expr", "parse_program", "parse_surface_expr", "parse_surface_program",
    "parse_surface_type", "parse_type", "pretty", "pretty_env", "pretty_query", "show_name",
]
