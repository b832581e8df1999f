"""Deciding implications between refinement predicates."""

from .encode import Encoder, NotBoolean, encode, env_assumptions
from .formula import Formula, LinTerm
from .oracle import (
    BuiltinOracle, ExternalOracle, Invalid, Oracle, OracleError, Query,
    RecordingOracle, Unknown, Valid, Verdict, check_impl, emit_smtlib, make_query,
)
from .solver import Sat, Unsat, solve

__all__ = [
    "BuiltinOracle", "Encoder", "ExternalOracle", "Formula", "Invalid", "LinTerm",
    "NotBoolean", "Oracle", "OracleError", "Query", "RecordingOracle", "Sat",
    "Unknown", "Unsat", "Valid", "Verdict", "check_impl", "emit_smtlib", "encode",
    "env_assumptions", "make_query", "solve",
]
