"""A refinement type checker for a small polymorphic lambda calculus.

The usual entry points:

    >>> from sysrf import parse_expr, Checker, EMPTY, pretty
    >>> pretty(Checker().synth(EMPTY, parse_expr("2 <= 3")))
    'exists x:Int{v: v == 2}. exists y:Int{v: v == 3}. Bool{v: v == (x <= y)}'
"""

from .checker import Checker, CheckerConfig
from .diagnostics import Diagnostic, ParseError, Span
from .driver import check_program, run_program
from .frontend import parse_expr, parse_program, parse_type, pretty
from .semantics import evaluate, step
from .syntax import EMPTY, Env

__all__ = [
    "EMPTY", "Checker", "CheckerConfig", "Diagnostic", "Env", "ParseError", "Span",
    "check_program", "evaluate", "parse_expr", "parse_program", "parse_type", "pretty",
    "run_program", "step",
]
