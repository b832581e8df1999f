import pytest

from sysrf.harness.gen import GenConfig, Generator, GiveUp
from sysrf.harness.requirements import canonical_values
from sysrf.primitives import delta, prim_type, sample_primitives
from sysrf.semantics import step
from sysrf.syntax import (
    BOOL, INT, App, BoundVar, Exists, FreeVar, Func, Kind, Lam, Name, Poly, Prim,
    Refn, TBool, TInt, TLam, TVarBound, int_, is_value, mk_eq, mk_leq, mk_not,
)
from sysrf.sysf import (
    FBool, FEnv, FFunc, FInt, FPoly, FTBound, FTVar, FTypeError, erase, f_check,
    f_check_or_raise, f_synth, f_wf_type,
)

V = BoundVar(0)
x, a = Name(1, "x"), Name(11, "a")


def test_erase_examples():
    assert erase(Refn(TInt(), mk_not(mk_leq(TInt(), V, int_(0))))) == FInt()
    assert erase(Exists(INT, Refn(TInt(), mk_eq(TInt(), V, BoundVar(1))))) == FInt()
    assert erase(Poly(Kind.BASE, Refn(TVarBound(0), V))) == FPoly(Kind.BASE, FTBound(0))


def test_wf_examples():
    assert f_wf_type(FEnv(), FInt(), Kind.BASE)
    assert not f_wf_type(FEnv(), FFunc(FInt(), FInt()), Kind.BASE)
    assert f_wf_type(FEnv().bind_ty(a, Kind.STAR), FTVar(a), Kind.STAR)
    assert not f_wf_type(FEnv().bind_ty(a, Kind.STAR), FTVar(a), Kind.BASE)
    assert f_wf_type(FEnv().bind_ty(a, Kind.BASE), FTVar(a), Kind.STAR)
    assert f_wf_type(FEnv(), FPoly(Kind.BASE, FFunc(FTBound(0), FTBound(0))))


def test_synth_examples():
    assert f_synth(FEnv(), Prim("and")) == FFunc(FBool(), FFunc(FBool(), FBool()))
    assert f_check(FEnv(), Lam(V), FFunc(FInt(), FInt()))
    delta_ = FEnv().bind(x, FInt())
    assert f_synth(delta_, App(App(Prim("leq_int"), FreeVar(x)), int_(3))) == FBool()


def test_synth_errors():
    with pytest.raises(FTypeError) as err:
        f_synth(FEnv(), FreeVar(x))
    assert err.value.code == "UnboundVariable"
    with pytest.raises(FTypeError) as err:
        f_synth(FEnv(), Lam(V))
    assert err.value.code == "CannotSynthesizeLambda"
    with pytest.raises(FTypeError) as err:
        f_synth(FEnv(), App(int_(1), int_(2)))
    assert err.value.code == "NotAFunction"
    with pytest.raises(FTypeError) as err:
        f_check_or_raise(FEnv(), int_(1), FBool())
    assert err.value.code == "TypeMismatch"
    from sysrf.syntax import TApp
    with pytest.raises(FTypeError) as err:
        f_synth(FEnv(), TApp(Prim("eq"), Func(INT, INT)))
    assert err.value.code == "KindMismatch"
    with pytest.raises(FTypeError) as err:
        f_synth(FEnv(), TApp(int_(1), INT))
    assert err.value.code == "NotAPolytype"


def test_polymorphic_identity():
    e = TLam(Kind.STAR, Lam(V))
    assert f_check(FEnv(), e, FPoly(Kind.STAR, FFunc(FTBound(0), FTBound(0))))
    assert not f_check(FEnv(), e, FPoly(Kind.BASE, FFunc(FTBound(0), FTBound(0))))


def test_primitives_at_f_level():
    for c in sample_primitives():
        t = prim_type(c)
        if not isinstance(t, Func):
            continue
        for v in canonical_values(t.arg):
            r = delta(c, v)
            assert r is not None
            assert f_check(FEnv(), r, erase(t.res)), (c, v, r)


def _f_canonical(v, tau):
    match tau:
        case FBool():
            return v in (Prim("true"), Prim("false"))
        case FInt():
            return isinstance(v, Prim) and v.tag == "int"
        case FFunc():
            return isinstance(v, Lam) or (isinstance(v, Prim) and isinstance(prim_type(v), Func))
        case FPoly():
            return isinstance(v, TLam) or (isinstance(v, Prim) and isinstance(prim_type(v), Poly))
    return False


def test_f_progress_preservation_on_generated_terms():
    gen = Generator(GenConfig(seed=3, size=5))
    done = 0
    for _ in range(60):
        try:
            goal, e = gen.program()
        except GiveUp:
            continue
        tau = erase(goal)
        assert f_check(FEnv(), e, tau)
        for _ in range(10_000):
            if is_value(e):
                break
            e = step(e)
            assert e is not None
            assert f_check(FEnv(), e, tau)
        assert _f_canonical(e, tau)
        done += 1
    assert done > 40


def test_erasure_of_base_types():
    assert erase(BOOL) == FBool()
    assert erase(Refn(TBool(), V)) == FBool()
