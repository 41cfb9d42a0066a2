import pytest

from lattc.conversion import TOP, Converter, Fuel, convert, check_refl, whnf
from lattc.errors import ConversionError, FuelExhausted
from lattc.kernel import GlobalEnv
from lattc.lattice import chain_config, default_config
from lattc.syntax import terms as T

from build import context, level, term
from corpus_util import checked

CFG = default_config()
CHAIN = chain_config()
L, H, S = (level(x, CHAIN) for x in "LHS")
BASE_ENV = checked("base.ltc").env


def test_beta():
    ctx, names = context(CFG, ("a", "{}", "Nat"))
    redex = T.App(T.Lam(frozenset(), T.Var(0)), frozenset(), T.Var(0))
    assert whnf(None, redex) == T.Var(0)


def test_k_on_refl_reduces():
    _, names = context(CFG, ("A", "{}", "Type 0"), ("a", "{}", "A"),
                       ("P", "{}", "Eq^{uip} A a a -> Type 0"), ("d", "{}", "P refl"))
    t = term("K A a P refl d", CFG, names)
    assert whnf(None, t) == T.Var(0)


def test_k_on_a_variable_is_stuck():
    _, names = context(CFG, ("A", "{}", "Type 0"), ("a", "{}", "A"),
                       ("P", "{}", "Eq^{uip} A a a -> Type 0"), ("p", "{}", "Eq^{uip} A a a"),
                       ("d", "{}", "P refl"))
    t = term("K A a P p d", CFG, names)
    assert whnf(None, t) == t


def test_axioms_are_neutral():
    t = term("em Nat", CFG)
    assert whnf(None, t) == t


def test_iota_and_delta():
    t = term("plus 2 3", CFG, env=BASE_ENV)
    assert whnf(BASE_ENV, t) == T.Succ(term("plus 1 3", CFG, env=BASE_ENV)) or \
        convert(BASE_ENV, frozenset(), t, T.numeral(5))
    assert convert(BASE_ENV, frozenset(), t, T.numeral(5))
    assert not convert(BASE_ENV, frozenset(), t, T.numeral(4))


def test_whnf_is_deterministic():
    t = term("plus 4 (plus 1 1)", CFG, env=BASE_ENV)
    assert whnf(BASE_ENV, t) == whnf(BASE_ENV, t)


def test_constant_function_ignores_high_argument():
    ctx, names = context(CHAIN, ("A", "L", "Type 0"),
                         ("f", "L", "(x :^L A) -> (y :^H A) -> A"),
                         ("x", "L", "A"), ("y", "H", "A"), ("z", "H", "A"))
    a = term("f x^L y^H", CHAIN, names)
    b = term("f x^L z^H", CHAIN, names)
    assert convert(None, L, a, b)
    assert not convert(None, H, a, b)
    assert not convert(None, TOP, a, b)


def test_super_high_argument_is_invisible_at_high():
    _, names = context(CHAIN, ("P", "H", "Nat^S -> Type 0"), ("n", "S", "Nat"))
    a = term("P n^S", CHAIN, names)
    b = term("P (succ n)^S", CHAIN, names)
    assert convert(None, H, a, b)
    assert convert(None, L, a, b)
    assert not convert(None, S, a, b)


def test_distinct_neutrals():
    _, names = context(CHAIN, ("A", "L", "Type 0"), ("x", "L", "A"), ("y", "L", "A"))
    assert not convert(None, H, term("x", CHAIN, names), term("y", CHAIN, names))


def test_incomparable_levels_are_compared():
    _, names = context(CFG, ("f", "{}", "Bool^{cl} -> Bool"))
    a = term("f true^{cl}", CFG, names)
    b = term("f false^{cl}", CFG, names)
    assert not convert(None, frozenset({"uip"}), a, b)
    assert convert(None, frozenset(), a, b)


def test_scrutinee_guarded_like_an_argument():
    _, names = context(CHAIN, ("b", "H", "Bool"), ("c", "H", "Bool"))
    a = term("BoolElim^H b (fun _ => Nat) 0 1", CHAIN, names)
    b = term("BoolElim^H c (fun _ => Nat) 0 1", CHAIN, names)
    assert convert(None, L, a, b)
    assert not convert(None, H, a, b)


def test_absurd_scrutinee_never_compared():
    _, names = context(CFG, ("u", "{}", "Void"), ("v", "{}", "Void"))
    assert convert(None, frozenset(), term("absurd u Nat", CFG, names), term("absurd v Nat", CFG, names))


def test_globals_unfold_only_on_mismatch():
    t = term("plus 30 30", CFG, env=BASE_ENV)
    # syntactically equal sides never touch the fuel
    assert Converter(BASE_ENV, Fuel(0)).convert(frozenset(), t, t)


def test_fuel_exhaustion_is_an_error():
    t = term("plus 30 30", CFG, env=BASE_ENV)
    with pytest.raises(FuelExhausted):
        convert(BASE_ENV, frozenset(), t, T.numeral(60), Fuel(10))


def test_check_refl():
    ctx, names = context(CHAIN, ("A", "L", "Type 0"),
                         ("f", "L", "(x :^L A) -> (y :^H A) -> A"),
                         ("x", "L", "A"), ("y", "H", "A"), ("z", "H", "A"))
    check_refl(None, CHAIN, ctx, L, term("f x^L y^H", CHAIN, names), term("f x^L z^H", CHAIN, names))
    with pytest.raises(ConversionError, match="true") as info:
        check_refl(None, CFG, (), frozenset(), T.Prim("true"), T.Prim("false"))
    assert info.value.lhs == T.Prim("true") and info.value.rhs == T.Prim("false")
