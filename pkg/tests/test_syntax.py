from hypothesis import given, strategies as st

from sysrf.syntax import (
    EMPTY, INT, TRUE, App, BoundVar, FreeVar, Func, Kind, Lam, Name, Poly, Prim,
    Refn, TInt, TVarBound, TVarFree, close_expr, close_type, env_of, fresh, ftv_type,
    fv, int_, is_locally_closed, is_value, mk_eq, mk_leq, open_expr, open_tyvar,
    open_type, tfv_type, TermBind,
)
from sysrf.semantics import step

from strategies import NAMES, exprs, types
from named import named

x, y, a = Name(1, "x"), Name(2, "y"), Name(11, "a")


def test_fv_examples():
    assert fv(FreeVar(x)) == {x}
    assert fv(int_(3)) == frozenset()
    assert fv(App(FreeVar(x), Lam(App(BoundVar(0), FreeVar(y))))) == {x, y}


def test_type_free_names():
    assert ftv_type(Refn(TVarFree(a))) == {a}
    assert tfv_type(Refn(TInt(), mk_eq(TInt(), BoundVar(0), FreeVar(x)))) == {x}
    assert ftv_type(Poly(Kind.BASE, Refn(TVarBound(0)))) == frozenset()


def test_is_value_examples():
    assert is_value(Lam(BoundVar(0)))
    assert not is_value(App(Lam(BoundVar(0)), int_(1)))
    assert is_value(Prim("leqN", 3))


def test_fresh_examples():
    assert fresh(set()) == Name(1)
    assert fresh({Name(1), Name(5)}) == Name(6)


@given(st.sets(st.integers(1, 50).map(Name)))
def test_fresh_is_fresh(used):
    n = fresh(used)
    assert n not in used
    assert fresh(used | {n}) != n


def test_open_examples():
    assert open_expr(BoundVar(0), y) == FreeVar(y)
    # index 1 in the predicate is the binder outside the refinement
    t = Refn(TInt(), mk_leq(TInt(), BoundVar(0), BoundVar(1)))
    assert open_type(t, y) == Refn(TInt(), mk_leq(TInt(), BoundVar(0), FreeVar(y)))
    assert open_tyvar(Refn(TVarBound(0)), a) == Refn(TVarFree(a))


def test_prim_payload_is_arbitrary_precision():
    big = 10**40
    assert int_(big).arg == big


@given(exprs(scope=1))
def test_open_matches_named_oracle(e):
    z = Name(99, "z")
    assert named(open_expr(e, z)) == named(e, terms=[("free", 99)])


@given(types(scope=1))
def test_open_type_matches_named_oracle(t):
    z = Name(99, "z")
    assert named(open_type(t, z)) == named(t, terms=[("free", 99)])


@given(exprs(scope=1))
def test_open_then_close(e):
    z = Name(99, "z")
    assert close_expr(open_expr(e, z), z) == e
    assert is_locally_closed(open_expr(e, z))


@given(types(scope=1))
def test_close_type_inverts_open(t):
    z = Name(99, "z")
    assert close_type(open_type(t, z), z) == t


@given(exprs(scope=1))
def test_fv_of_open(e):
    z = Name(99, "z")
    assert fv(open_expr(e, z)) <= fv(e) | {z}


@given(exprs())
def test_generated_terms_are_locally_closed(e):
    assert is_locally_closed(e)


def test_local_closure_scan_rejects_dangling():
    assert not is_locally_closed(BoundVar(0))
    assert not is_locally_closed(Lam(BoundVar(1)))
    assert is_locally_closed(BoundVar(0), term_depth=1)
    assert not is_locally_closed(Refn(TVarBound(0)))


@given(exprs())
def test_values_do_not_step(e):
    if is_value(e):
        assert step(e) is None


def test_env_order_and_lookup():
    env = env_of(TermBind(x, INT)).bind(y, Refn(TInt(), mk_eq(TInt(), BoundVar(0), FreeVar(x))))
    assert [b.name for b in env] == [x, y]
    assert env.lookup(x) == INT
    assert env.lookup(Name(7)) is None
    assert EMPTY.names() == set()


def test_names_compare_by_id_only():
    assert Name(3, "p") == Name(3, "q")
    assert Name(2) < Name(3)
    assert NAMES[0] != NAMES[1]
    assert Refn(TInt(), TRUE, "v") == Refn(TInt(), TRUE, "w")
    assert Func(INT, INT, "x") == Func(INT, INT, "y")
