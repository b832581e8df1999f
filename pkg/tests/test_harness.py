import pytest

from sysrf.checker import Checker
from sysrf.harness import (
    GenConfig, Generator, GiveUp, canonical_forms_run, determinism_run, erasure_run,
    mutation_run, progress_preservation_run, requirement_implication, requirement_primitives,
    round_trip_run, solver_run, substitution_run,
)
from sysrf.harness.gen import POLY_ID_TERM, singleton
from sysrf.harness.soundness import SoundnessReport, canonical_violation, follow, refinement_violation
from sysrf.primitives import delta
from sysrf.syntax import (
    BOOL, EMPTY, FALSE, INT, TRUE, App, BoundVar, Lam, Prim, Refn, TBool, TInt, int_,
)

from conftest import T

SMALL = GenConfig(seed=7, terms=40, size=5)


def test_forced_literal():
    g = Generator(GenConfig(seed=1))
    assert g.gen(EMPTY, singleton(TInt(), int_(3)), 1) == int_(3)


def test_boolean_connectives_appear():
    shapes = set()
    for seed in range(40):
        e = Generator(GenConfig(seed=seed)).gen(EMPTY, BOOL, 3)
        if isinstance(e, App) and isinstance(e.fn, App) and isinstance(e.fn.fn, Prim):
            shapes.add(e.fn.fn.tag)
    assert "and" in shapes


def test_identity_at_selfified_arrow():
    goal = T("x:Int -> Int{v: v == x}")
    outs = {Generator(GenConfig(seed=s)).gen(EMPTY, goal, 2) for s in range(20)}
    assert Lam(BoundVar(0)) in outs


def test_unrealizable_goal_gives_up():
    with pytest.raises(GiveUp):
        Generator(GenConfig()).gen(EMPTY, Refn(TInt(), FALSE), 4)


def test_generated_terms_check_at_their_goal():
    g = Generator(SMALL)
    c = Checker()
    for _ in range(SMALL.terms):
        goal, e = g.program()
        c.check(EMPTY, e, goal)


def test_generation_is_deterministic():
    a = [Generator(SMALL).program() for _ in range(1)]
    b = [Generator(SMALL).program() for _ in range(1)]
    assert a == b
    assert progress_preservation_run(SMALL).as_dict() == progress_preservation_run(SMALL).as_dict()


def test_progress_preservation_small():
    r = progress_preservation_run(SMALL)
    assert r.failures == 0, r.as_dict()
    assert r.termsGenerated == SMALL.terms
    assert r.stepsTaken > 0


def test_values_take_no_steps():
    rep = SoundnessReport()
    assert follow(Checker(), int_(2), INT, 100, rep) == int_(2)
    assert rep.stepsTaken == 0 and rep.failures == 0


def test_follow_records_stuck_terms():
    rep = SoundnessReport()
    follow(Checker(), App(int_(1), int_(2)), INT, 100, rep)
    assert len(rep.stuckEvents) == 1


def test_value_checks():
    assert canonical_violation(TRUE, BOOL) is None
    assert canonical_violation(int_(1), BOOL) is not None
    assert canonical_violation(Prim("and"), T("Bool -> Bool -> Bool")) is None
    assert canonical_violation(POLY_ID_TERM.sub, T("forall a:B. a -> a")) is None
    assert refinement_violation(int_(1), T("Int{v: 0 < v}"), 100) is None
    assert refinement_violation(int_(0), T("Int{v: 0 < v}"), 100) is not None


def test_mutations_are_caught():
    reports = mutation_run(GenConfig(seed=42, terms=60))
    for name, rep in reports.items():
        assert rep.failures > 0, name


def test_property_runs_small():
    for run in (canonical_forms_run, substitution_run, erasure_run, round_trip_run):
        r = run(SMALL)
        assert r.ok, (run.__name__, r.failures[:3])
        assert r.checked > 0


def test_determinism_run_small():
    r = determinism_run(n=500, seed=3)
    assert r.ok and r.checked == 500


def test_requirement_suites():
    prim = requirement_primitives()
    assert prim.ok, prim.failures[:3]
    imp = requirement_implication(n=20, seed=5)
    assert imp.ok, imp.failures[:3]
    assert imp.notes["queries"] > 100


def test_primitive_table_example():
    c = Checker()
    c.check(EMPTY, delta(Prim("and"), TRUE), T("y:Bool -> Bool{v: v == (true && y)}"))
    c.check(EMPTY, Prim("eq_int"), T("x:Int -> y:Int -> Bool{v: v == (x == y)}"))
    c.wf_type(EMPTY, Refn(TBool(), T("Bool{v: v == true}").pred))


def test_solver_run_small():
    r = solver_run(n=100, seed=9)
    assert not r.disagreements and r.solves == 200
