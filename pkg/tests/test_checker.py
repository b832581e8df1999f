import pytest
from hypothesis import given, settings, strategies as st

from sysrf.checker import Checker, CheckerConfig, selfify
from sysrf.diagnostics import Diagnostic
from sysrf.harness.gen import GenConfig, Generator, GiveUp
from sysrf.primitives import prim_type
from sysrf.syntax import (
    BOOL, EMPTY, INT, App, Ann, BoundVar, Exists, FreeVar, Func, Kind, Lam, Name, Poly,
    Prim, Refn, TApp, TermBind, TInt, TVarFree, TyBind, env_of, int_, mk_and, mk_eq, mk_leq,
)
from sysrf.sysf import erase, erase_env, f_synth

from conftest import E, T

V = BoundVar(0)
x, y, f, e_, a = Name(1, "x"), Name(2, "y"), Name(3, "f"), Name(4, "e"), Name(11, "a")
POS = "Int{v: 0 < v}"
NAT = "Int{v: 0 <= v}"


def rejects(thunk, code):
    with pytest.raises(Diagnostic) as err:
        thunk()
    assert err.value.code == code, f"{err.value.code}: {err.value.message}"
    return err.value


def test_prim_type_examples():
    assert prim_type(int_(3)) == T("Int{v: v == 3}")
    assert prim_type(Prim("leqN", 2)) == T("y:Int -> Bool{v: v == (2 <= y)}")
    assert prim_type(Prim("eq")) == T("forall a:B. x:a -> y:a -> Bool{v: v == (x == y)}")
    assert prim_type(Prim("and")) == T("x:Bool -> y:Bool -> Bool{v: v == (x && y)}")


def test_wf_type_examples():
    c = Checker()
    env = EMPTY.bind_ty(a, Kind.BASE).bind(y, Refn(TVarFree(a)))
    assert c.wf_type(env, Refn(TVarFree(a), mk_leq(TVarFree(a), V, FreeVar(y)))) is Kind.BASE
    star = EMPTY.bind_ty(a, Kind.STAR)
    rejects(lambda: c.wf_type(star, Refn(TVarFree(a), mk_eq(TInt(), int_(3), int_(3)))), "RefinedStarVariable")
    assert c.wf_type(star, Refn(TVarFree(a))) is Kind.STAR
    assert c.wf_type(EMPTY, T("Int -> Int")) is Kind.STAR
    assert c.wf_type(EMPTY, T("forall a:*. a -> a")) is Kind.STAR
    rejects(lambda: c.wf_type(EMPTY, Refn(TVarFree(a))), "UnboundTypeVariable")
    rejects(lambda: c.wf_type(EMPTY, Refn(TInt(), int_(1))), "PredicateNotBool")


def test_wf_env_examples():
    c = Checker()
    c.wf_env(EMPTY)
    bad = env_of(TermBind(x, Refn(TInt(), mk_eq(TInt(), V, FreeVar(y)))))
    rejects(lambda: c.wf_env(bad), "IllFormedBindingType")
    # bindings listed outermost first: y may mention x
    c.wf_env(env_of(TermBind(x, INT), TermBind(y, Refn(TInt(), mk_eq(TInt(), V, FreeVar(x))))))
    rejects(lambda: c.wf_env(env_of(TermBind(x, INT), TyBind(x, Kind.BASE))), "DuplicateBinding")


def test_selfify_examples():
    pos = T(POS)
    got = selfify(pos, x, Kind.BASE)
    assert got == Refn(TInt(), mk_and(pos.pred, mk_eq(TInt(), V, FreeVar(x))))
    fn = T("Int -> Int")
    assert selfify(fn, x, Kind.STAR) == fn
    ex = Exists(INT, Refn(TInt(), mk_eq(TInt(), V, BoundVar(1))), "z")
    assert selfify(ex, x, Kind.BASE) == Exists(INT, Refn(TInt(), mk_and(ex.body.pred, mk_eq(TInt(), V, FreeVar(x)))), "z")
    assert selfify(INT, x, Kind.BASE) == Refn(TInt(), mk_eq(TInt(), V, FreeVar(x)))
    assert selfify(INT, x, Kind.STAR) == INT


def test_synth_examples():
    c = Checker()
    assert c.synth(EMPTY, int_(3)) == T("Int{v: v == 3}")
    env = EMPTY.bind(x, T("Int{v: v == 5}"))
    assert c.synth(env, FreeVar(x)) == T("Int{v: v == 5 && v == x}", env)


def test_synth_dependent_application():
    c = Checker()
    env = EMPTY.bind(f, T("x:Int -> Int{v: v == x}")).bind(e_, T(POS))
    got = c.synth(env, App(FreeVar(f), FreeVar(e_)))
    # a variable argument is substituted directly
    assert got == T("Int{v: v == e}", env)
    packed = Exists(T(POS), Refn(TInt(), mk_eq(TInt(), V, BoundVar(1))))
    # the substituted type is at least as precise as the packed one, not conversely
    c.sub(env, got, packed)
    rejects(lambda: c.sub(env, packed, got), "ImplicationFailed")
    # any other argument is packed into an existential over its synthesized type
    arg = Ann(int_(5), T(POS))
    assert c.synth(env, App(FreeVar(f), arg)) == packed
    c.check(env, App(FreeVar(f), arg), T(POS))


def test_synth_let_packs_existential():
    c = Checker()
    got = c.synth(EMPTY, E("let y = 3 in y"))
    assert isinstance(got, Exists)
    c.sub(EMPTY, got, T("Int{v: v == 3}"))


def test_synth_errors():
    c = Checker()
    rejects(lambda: c.synth(EMPTY, Lam(V)), "CannotSynthesizeLambda")
    rejects(lambda: c.synth(EMPTY, App(int_(1), int_(2))), "NotAFunction")
    rejects(lambda: c.synth(EMPTY, E("3 [Int]")), "NotAPolytype")
    rejects(lambda: c.synth(EMPTY, FreeVar(x)), "UnboundVariable")


def test_check_examples():
    c = Checker()
    c.check(EMPTY, Lam(V), T("x:Int -> Int{v: v == x}"))
    c.check(EMPTY, E("/\\a:B -> \\x -> x"), T("forall a:B. x:a -> a{v: v == x}"))
    d = rejects(lambda: c.check(EMPTY, int_(0), T("Int{n: not (n == 0)}")), "SubtypeFailure")
    assert d.root().code == "ImplicationFailed"
    assert d.query is not None
    rejects(lambda: c.check(EMPTY, Lam(V), INT), "ExpectedFunctionType")
    rejects(lambda: c.check(EMPTY, E("/\\a:* -> \\x -> x"), T("forall a:B. a -> a")), "KindMismatchOnTLam")


def test_check_max_against_kinded_signature():
    c = Checker()
    sig = T("forall a:B. x:a -> y:a -> a{v: x <= v && y <= v}")
    c.wf_type(EMPTY, sig)
    env = EMPTY.bind(Name(30, "max"), sig)
    c.check(env, E("max [Int{v: 0 < v}] 1 2", env), T(POS))
    c.check(env, E("max [Bool] false true", env), T("Bool{v: v}"))
    bad = E("max [Int] 1 2", env)
    rejects(lambda: c.check(env, bad, T("Int{v: v == 1}")), "SubtypeFailure")


def test_sub_examples():
    c = Checker()
    c.sub(EMPTY, T(POS), T(NAT))
    rejects(lambda: c.sub(EMPTY, T(NAT), T(POS)), "ImplicationFailed")
    c.sub(EMPTY, T("x:Int -> Int{v: 0 < v}"), T("x:Int{v: 0 < v} -> Int{v: 0 <= v}"))
    c.sub(EMPTY, T(f"{NAT} -> {POS}"), T(f"{POS} -> {NAT}"))
    rejects(lambda: c.sub(EMPTY, T(f"{POS} -> {NAT}"), T(f"{NAT} -> {POS}")), "ImplicationFailed")
    rejects(lambda: c.sub(EMPTY, INT, BOOL), "ErasureMismatch")
    rejects(lambda: c.sub(EMPTY, T("forall a:B. a"), T("forall a:*. a")), "KindMismatch")


def test_sub_one_point_witness():
    c = Checker()
    env = EMPTY.bind(y, T(POS))
    s = Refn(TInt(), mk_and(T(POS).pred, mk_eq(TInt(), V, FreeVar(y))))
    t = Exists(INT, Refn(TInt(), mk_eq(TInt(), V, BoundVar(1))))
    c.sub(env, s, t)
    c.sub(env, s, Refn(TInt(), mk_eq(TInt(), V, FreeVar(y))))
    d = rejects(lambda: c.sub(EMPTY, T("Int{v: v == 1}"), Exists(T(POS), Refn(TInt(), mk_eq(TInt(), V, int_(2))))),
                "WitnessNotFound")
    assert "1" in d.message


def test_implication_unknown_is_distinct():
    from sysrf.implication import BuiltinOracle
    c = Checker(BuiltinOracle(max_vars=1))
    env = EMPTY.bind(x, INT).bind(y, T("Int{v: x <= v}", EMPTY.bind(x, INT)))
    # transitivity needs arithmetic over more variables than the limit allows
    want = T("Int{v: x <= v}", env)
    env = env.bind(f, T("Int{v: y <= v}", env))
    d = rejects(lambda: c.check(env, FreeVar(f), want), "ImplicationUnknown")
    assert Checker().check(env, FreeVar(f), want) is None
    assert d.query is not None


def test_diagnostics_carry_trail_and_rule():
    c = Checker()
    d = rejects(lambda: c.check(EMPTY, E("\\x -> x"), T("x:Int -> Int{v: 0 <= v}")), "SubtypeFailure")
    assert d.rule == "S-Base"
    assert "T-Abs" in d.trail


def test_mutated_checker_skips_implications():
    c = Checker(config=CheckerConfig(sbase_implication=False))
    c.check(EMPTY, int_(0), T(POS))
    c = Checker(config=CheckerConfig(selfify=False))
    env = EMPTY.bind(x, INT)
    rejects(lambda: c.check(env, FreeVar(x), T("Int{v: v == x}", env)), "SubtypeFailure")


# ------------------------------------------------------------ properties

def _types(seed, n=8):
    g = Generator(GenConfig(seed=seed))
    return [g.goal() for _ in range(n)]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_sub_is_reflexive(seed):
    c = Checker()
    for t in _types(seed):
        c.sub(EMPTY, t, t)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_selfified_type_is_a_subtype(seed):
    c = Checker()
    for t in _types(seed):
        z = Name(500, "z")
        env = EMPTY.bind(z, t)
        k = c.wf_type(EMPTY, t)
        c.sub(env, selfify(t, z, k), t)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_base_kinded_types_are_accepted_at_star(seed):
    c = Checker()
    for t in _types(seed):
        if c.wf_type(EMPTY, t) is Kind.BASE:
            # a polymorphic identity over * accepts any base type argument
            inst = E("((/\\a:* -> \\x -> x) : forall a:*. a -> a)")
            c.synth(EMPTY, TApp(inst, t))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_synth_respects_erasure(seed):
    g = Generator(GenConfig(seed=seed, size=5))
    c = Checker()
    for _ in range(4):
        try:
            goal, e = g.program()
        except GiveUp:
            continue
        try:
            t = c.synth(EMPTY, e)
        except Diagnostic:
            continue
        assert f_synth(erase_env(EMPTY), e) == erase(t)


def test_poly_subtyping():
    c = Checker()
    c.sub(EMPTY, T("forall a:B. x:a -> a{v: v == x}"), T("forall a:B. a -> a"))
    assert isinstance(T("forall a:B. a -> a"), Poly)
    assert isinstance(T("Int -> Int"), Func)
