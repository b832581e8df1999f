import os
import shutil
from pathlib import Path

import pytest

from sysrf.frontend import parse_expr, parse_type

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

# lines printed at the end of the session by the acceptance suite
ACCEPTANCE_LINES: list[str] = []


def external_solver() -> str | None:
    if os.environ.get("RF_SMT_CMD"):
        return os.environ["RF_SMT_CMD"]
    return "z3 -in" if shutil.which("z3") else None


needs_solver = pytest.mark.skipif(external_solver() is None, reason="no external SMT solver")


def T(text, env=None):
    return parse_type(text, env)


def E(text, env=None):
    return parse_expr(text, env)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
