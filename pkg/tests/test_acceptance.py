"""One test per acceptance criterion, each run at its stated size and time limit.

Every test records a PASS/FAIL line; the lines are printed together at the
end of the session by the terminal-summary hook in conftest.
"""

import time
from contextlib import contextmanager

from sysrf import cli
from sysrf.frontend import parse_expr, parse_program, parse_type, pretty
from sysrf.harness import (
    GenConfig, determinism_run, erasure_run, mutation_run, progress_preservation_run,
    requirement_implication, requirement_primitives, round_trip_run, solver_run,
)

from conftest import ACCEPTANCE_LINES, CORPUS

SEED = 42


@contextmanager
def criterion(number: int, title: str):
    facts: dict = {}
    start = time.perf_counter()
    ok = False
    try:
        yield facts
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        detail = ", ".join(f"{k}={v}" for k, v in facts.items())
        line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title} ({elapsed:.1f}s{'; ' + detail if detail else ''})"
        ACCEPTANCE_LINES.append(line)
        print(line)


def within(facts, start, limit):
    facts["limit"] = f"{limit}s"
    elapsed = time.perf_counter() - start
    assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"


EXPECTED_EXITS = {
    "max.rf": 0, "identity.rf": 0, "posnat.rf": 0, "div0.rf": 1, "star.rf": 1,
}


def test_1_corpus_check(capsys):
    with criterion(1, "corpus check exit codes") as facts:
        start = time.perf_counter()
        got = {}
        for name in EXPECTED_EXITS:
            got[name] = cli.main(["check", str(CORPUS / name)])
        err = capsys.readouterr().err
        facts["exits"] = " ".join(f"{n}:{c}" for n, c in got.items())
        assert got == EXPECTED_EXITS
        assert "ImplicationFailed" in err and "S-Base" in err
        assert "RefinedStarVariable" in err
        within(facts, start, 5)


def test_2_primitive_obligations():
    with criterion(2, "primitive obligations over [-3,3]") as facts:
        start = time.perf_counter()
        r = requirement_primitives(-3, 3)
        facts["checks"], facts["failures"] = r.checks, len(r.failures)
        assert r.ok, r.failures[:5]
        within(facts, start, 30)


def test_3_implication_axioms():
    with criterion(3, "implication axiom battery") as facts:
        start = time.perf_counter()
        r = requirement_implication(seed=SEED)
        facts["queries"], facts["contradictions"] = r.notes["queries"], len(r.failures)
        facts["unknown"] = r.notes["unknown"]
        assert r.notes["queries"] >= 1000
        assert r.ok, r.failures[:5]
        within(facts, start, 60)


def test_4_dynamic_soundness():
    with criterion(4, "progress and preservation on 500 generated terms") as facts:
        cfg = GenConfig(seed=SEED, terms=500, fuel=10_000)
        start = time.perf_counter()
        r = progress_preservation_run(cfg)
        elapsed = time.perf_counter() - start
        facts["terms"], facts["steps"] = r.termsGenerated, r.stepsTaken
        facts["stuck"], facts["preservation"] = len(r.stuckEvents), len(r.preservationFailures)
        facts["other"] = r.failures - len(r.stuckEvents) - len(r.preservationFailures)
        assert r.termsGenerated == 500
        assert r.failures == 0, r.as_dict()
        assert elapsed < 180, f"took {elapsed:.1f}s"
        again = progress_preservation_run(cfg)
        facts["deterministic"] = again.as_dict() == r.as_dict()
        assert facts["deterministic"]
        mutants = mutation_run(GenConfig(seed=SEED, terms=100))
        for name, rep in mutants.items():
            facts[name] = rep.failures
            assert rep.failures >= 1, f"mutation {name} went unnoticed"


def test_5_solver_vs_enumeration():
    with criterion(5, "builtin solver against enumeration, 2000 formulas") as facts:
        r = solver_run(n=2000, seed=SEED)
        facts["disagreements"] = len(r.disagreements)
        facts["unknownRate"] = f"{r.unknown_rate:.2%}"
        assert r.formulas == 2000
        assert not r.disagreements, r.disagreements[:5]
        assert r.unknown_rate < 0.05


def _corpus_judgments():
    out = []
    for path in sorted(CORPUS.glob("*.rf")):
        prog = parse_program(path.read_text(), str(path))
        for i, d in enumerate(prog.defs):
            out.append((prog.env_before(i), d.body, d.signature))
    return out


def test_6_erasure_respect():
    with criterion(6, "erasure respect on corpus and 500 generated terms") as facts:
        r = erasure_run(GenConfig(seed=SEED, terms=500), extra=_corpus_judgments())
        facts["accepted"], facts["failures"] = r.checked, len(r.failures)
        assert r.checked >= 500
        assert r.ok, r.failures[:5]


def test_7_step_determinism():
    with criterion(7, "step determinism on 10000 random terms") as facts:
        r = determinism_run(n=10_000, seed=SEED)
        facts["terms"], facts["failures"] = r.checked, len(r.failures)
        assert r.checked == 10_000
        assert r.ok, r.failures[:5]


def test_8_round_trip():
    with criterion(8, "print/parse round trip on corpus and generated trees") as facts:
        checked = 0
        for path in sorted(CORPUS.glob("*.rf")):
            prog = parse_program(path.read_text(), str(path))
            for i, d in enumerate(prog.defs):
                env = prog.env_before(i)
                assert parse_type(pretty(d.signature), env) == d.signature, d.name
                assert parse_expr(pretty(d.body), env, expected=d.signature) == d.body, d.name
                checked += 2
            if prog.main is not None:
                whole = prog.as_expr()
                assert parse_expr(pretty(whole)) == whole, path.name
                checked += 1
        r = round_trip_run(GenConfig(seed=SEED, terms=500))
        facts["trees"], facts["failures"] = checked + r.checked, len(r.failures)
        assert r.ok, r.failures[:5]
