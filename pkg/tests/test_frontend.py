import json

import pytest
from hypothesis import given, settings, strategies as st

from sysrf import cli
from sysrf.diagnostics import Diagnostic, ParseError
from sysrf.frontend import RejectedExistentialAnnotation, parse_expr, parse_program, parse_type, pretty
from sysrf.harness.gen import GenConfig, Generator, GiveUp
from sysrf.semantics import Stuck
from sysrf.syntax import (
    EMPTY, INT, App, BoundVar, Exists, FreeVar, Func, Kind, Lam, Name, Poly, Prim, Refn,
    TApp, TBool, TInt, TVarBound, int_, is_locally_closed, mk_and, mk_eq, mk_leq, mk_not,
)

from conftest import CORPUS

V = BoundVar(0)


def test_parse_refinement():
    assert parse_type("Int{v: 0 <= v}") == Refn(TInt(), mk_leq(TInt(), int_(0), V))


def test_parse_kinded_max_signature():
    t = parse_type("forall a:B. x:a -> y:a -> a{v: x <= v && y <= v}")
    a = TVarBound(0)
    pred = mk_and(mk_leq(a, BoundVar(2), V), mk_leq(a, BoundVar(1), V))
    assert t == Poly(Kind.BASE, Func(Refn(a), Func(Refn(a), Refn(a, pred))))


def test_sugar():
    assert parse_expr("1 < 2") == mk_and(mk_leq(TInt(), int_(1), int_(2)), mk_not(mk_eq(TInt(), int_(1), int_(2))))
    assert parse_expr("1 != 2") == mk_not(mk_eq(TInt(), int_(1), int_(2)))
    assert parse_expr("true <=> false") == App(App(Prim("iff"), Prim("true")), Prim("false"))
    # && binds tighter than ||
    assert parse_expr("true || false && true") == App(
        App(Prim("or"), Prim("true")), mk_and(Prim("false"), Prim("true"))
    )


def test_comparison_instantiates_at_operand_type():
    assert parse_expr("true <= false") == mk_leq(TBool(), Prim("true"), Prim("false"))
    x = Name(1, "x")
    env = EMPTY.bind(x, INT)
    assert parse_expr("x == 3", env) == mk_eq(TInt(), FreeVar(x), int_(3))


def test_identity_round_trip():
    sig = parse_type("x:Int -> Int{v: v == x}")
    e = parse_expr("\\x -> x", expected=sig)
    assert e == Lam(V)
    assert parse_expr(pretty(e)) == e
    assert parse_type(pretty(sig)) == sig


def test_pretty_examples():
    assert pretty(Refn(TInt(), mk_eq(TInt(), V, int_(3)))) == "Int{v: v == 3}"
    ex = Exists(INT, Refn(TInt(), mk_eq(TInt(), V, BoundVar(1))), "x")
    assert pretty(ex) == "exists x:Int. Int{v: v == x}"
    assert pretty(TApp(Prim("eq"), INT)) == "%eq [Int]"
    assert pretty(Prim("leqN", -2)) == "%leq(-2)"


def test_existentials_parse_only_outside_annotations():
    ex = parse_type("exists x:Int. Int{v: v == x}")
    assert isinstance(ex, Exists)
    with pytest.raises(RejectedExistentialAnnotation):
        parse_program("def f : exists x:Int. Int = 3")
    with pytest.raises(RejectedExistentialAnnotation):
        parse_program("def f : Int = (3 : exists x:Int. Int)")


def test_parse_errors_have_spans():
    with pytest.raises(ParseError) as err:
        parse_program("def f : Int = ")
    assert err.value.span.line == 1
    with pytest.raises(ParseError) as err:
        parse_program("def f : Int = 1\ndef f : Int = 2")
    assert "duplicate" in err.value.message and err.value.span.line == 2
    with pytest.raises(Diagnostic) as err:
        parse_program("def f : Int = y")
    assert err.value.code == "UnboundVariable"


def test_program_structure():
    prog = parse_program((CORPUS / "identity.rf").read_text())
    assert [d.name.hint for d in prog.defs] == ["id", "pid", "three", "same"]
    assert prog.main is not None
    assert is_locally_closed(prog.as_expr())


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.rf")), ids=lambda p: p.name)
def test_corpus_round_trip(path):
    prog = parse_program(path.read_text())
    for i, d in enumerate(prog.defs):
        env = prog.env_before(i)
        assert parse_type(pretty(d.signature), env) == d.signature
        assert parse_expr(pretty(d.body), env, expected=d.signature) == d.body
    if prog.main is not None:
        whole = prog.as_expr()
        assert parse_expr(pretty(whole)) == whole


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_generated_round_trip(seed):
    g = Generator(GenConfig(seed=seed, size=5))
    try:
        goal, e = g.program()
    except GiveUp:
        return
    assert parse_type(pretty(goal)) == goal
    assert parse_expr(pretty(e), expected=goal) == e


# ------------------------------------------------------------ command line

def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name,code", [
    ("max.rf", 0), ("identity.rf", 0), ("posnat.rf", 0), ("leq.rf", 0), ("div0.rf", 1), ("star.rf", 1),
])
def test_check_exit_codes(capsys, name, code):
    assert run(capsys, "check", CORPUS / name)[0] == code


def test_check_text_output(capsys):
    code, out, _ = run(capsys, "check", CORPUS / "identity.rf")
    assert code == 0
    assert "ok (4 definitions)" in out
    # a literal argument is packed into an existential over its own type
    assert "main : exists x:Int{v: v == 7}. Int{v: v == x}" in out


def test_div0_reports_sbase_failure(capsys):
    code, _, err = run(capsys, "check", CORPUS / "div0.rf")
    assert code == 1
    assert "error[ImplicationFailed] in useDiv" in err
    assert "rule: S-Base" in err
    assert "==> not (v$" in err and "== 0)" in err


def test_star_reports_refined_star_variable(capsys):
    code, _, err = run(capsys, "check", CORPUS / "star.rf")
    assert code == 1 and "RefinedStarVariable" in err


def test_json_is_deterministic(capsys):
    first = run(capsys, "check", CORPUS / "div0.rf", "--json")
    second = run(capsys, "check", CORPUS / "div0.rf", "--json")
    assert first == second
    doc = json.loads(first[1])
    assert doc["ok"] is False and doc["exitCode"] == 1
    (diag,) = doc["diagnostics"]
    assert diag["code"] == "ImplicationFailed"
    assert diag["rule"] == "S-Base"
    assert set(diag["span"]) == {"file", "line", "col", "endLine", "endCol"}
    assert "query" in diag and diag["definition"] == "useDiv"


def test_run_prints_value(capsys):
    assert run(capsys, "run", CORPUS / "leq.rf")[:2] == (0, "true\n")
    assert run(capsys, "run", CORPUS / "posnat.rf")[:2] == (0, "1\n")


def test_run_out_of_fuel(capsys):
    code, _, err = run(capsys, "run", CORPUS / "leq.rf", "--fuel", "1")
    assert code == 4 and "out of fuel" in err


def test_run_stuck(capsys, monkeypatch):
    monkeypatch.setattr(cli, "run_program", lambda prog, fuel: Stuck(App(int_(1), int_(2)), "forced", 0))
    code, _, err = run(capsys, "run", CORPUS / "leq.rf")
    assert code == 3 and "stuck: forced" in err


def test_run_refuses_ill_typed(capsys):
    assert run(capsys, "run", CORPUS / "div0.rf")[0] == 1


def test_parse_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.rf"
    bad.write_text("def f : Int = (1")
    code, _, err = run(capsys, "check", bad)
    assert code == 2 and "parse error" in err
    code, out, _ = run(capsys, "check", bad, "--json")
    assert code == 2 and json.loads(out)["exitCode"] == 2


def test_missing_file(capsys, tmp_path):
    assert run(capsys, "check", tmp_path / "nope.rf")[0] == 5


def test_emit_smt(capsys, tmp_path):
    code, out, _ = run(capsys, "emit-smt", CORPUS / "posnat.rf", "--out", tmp_path)
    assert code == 0
    files = sorted(tmp_path.glob("posnat-*.smt2"))
    assert files and f"wrote {len(files)} queries" in out
    text = files[0].read_text()
    assert text.startswith("; ") and "(check-sat)" in text and "builtin verdict: Valid" in text


def test_external_solver_missing(capsys, monkeypatch):
    monkeypatch.delenv("RF_SMT_CMD", raising=False)
    code, _, err = run(capsys, "check", CORPUS / "posnat.rf", "--smt", "external")
    assert code == 5 and "RF_SMT_CMD" in err


def test_check_with_external_solver(capsys, monkeypatch):
    from conftest import external_solver
    cmd = external_solver()
    if cmd is None:
        pytest.skip("no external SMT solver")
    monkeypatch.setenv("RF_SMT_CMD", cmd)
    assert run(capsys, "check", CORPUS / "posnat.rf", "--smt", "external")[0] == 0
    assert run(capsys, "check", CORPUS / "div0.rf", "--smt", "external")[0] == 1


def test_selftest_small(capsys):
    code, out, _ = run(capsys, "selftest", "--terms", "5", "--seed", "1", "--json")
    doc = json.loads(out)
    assert code == (0 if doc["ok"] else 1)
    assert doc["ok"]
