import pytest

from lattc.elaborate import default_annotations
from lattc.errors import IllegalLevel, ParseError, ScopeError, UnknownExtension
from lattc.lattice import chain_config, default_config
from lattc.syntax import terms as T
from lattc.syntax.parser import parse_module, parse_term, tokenize
from lattc.syntax.printer import print_declarations, print_term
from lattc.syntax.resolve import resolve, resolve_term
from lattc.syntax.surface import SDecl, SLam, SPi, SSpine

from lattc.elaborate import elaborate_module
from lattc.kernel import GlobalEnv

from corpus_util import positive_files, resolved, config_for

CFG = default_config()
CHAIN = chain_config()
BASE = frozenset()
H = frozenset({"h"})


def core(text, cfg=CFG, scope=(), env=()):
    surface = parse_term(text)
    decl = default_annotations(SDecl("def", "_t", None, surface, surface))
    return resolve_term(decl.type, cfg, scope, env)


def test_identity_declaration():
    m = parse_module("def id :^{} (A :^{} Type 0) -> (x :^{} A) -> A := fun A^{} x^{} => x")
    (d,) = m.decls
    assert (d.kind, d.name, d.level.names) == ("def", "id", ())
    assert isinstance(d.type, SPi) and isinstance(d.body, SLam)
    assert [b.name for b in d.body.binders] == ["A", "x"]


def test_constant_function_with_aliases():
    text = "def k :^L (x :^L A) -> (y :^H A) -> A := fun x^L y^H => x"
    (d,) = parse_module(text).decls
    assert d.level.alias == "L"
    assert [b.level.alias for b in d.body.binders] == ["L", "H"]
    (core_d,) = resolve(parse_module(text), CHAIN, ["A"])
    assert core_d.type == T.Pi(BASE, T.Global("A"), T.Pi(H, T.Global("A"), T.Global("A")))
    assert core_d.body == T.Lam(BASE, T.Lam(H, T.Var(1)))


def test_malformed_declaration():
    with pytest.raises(ParseError) as info:
        parse_module("def bad := :=")
    assert info.value.span.start == 8
    assert info.value.expected == ("':'",)


def test_parse_error_location():
    text = "def a : Nat := 1\n\ndef b : Nat := )"
    with pytest.raises(ParseError) as info:
        parse_module(text, "f.ltc")
    assert info.value.span.location(text) == "f.ltc:3:16"


def test_unexpected_character():
    with pytest.raises(ParseError, match="unexpected character"):
        tokenize("def a : Nat := 1 $")


def test_level_before_or_after_colon():
    a = parse_module("def x :^H Nat := 0").decls[0]
    b = parse_module("def x ^H : Nat := 0").decls[0]
    assert a.level == b.level


def test_arrow_domain_level():
    t = parse_term("Nat^S -> Type 0")
    assert isinstance(t, SPi) and t.level.alias == "S"
    with pytest.raises(ParseError, match="arrow domain"):
        parse_term("f^H")


def test_assert_level():
    (d,) = parse_module("assert_level f <= {ua, cl}").decls
    assert (d.kind, d.name, d.level.names) == ("assert_level", "f", ("ua", "cl"))


def test_comments_and_primes():
    (d,) = parse_module("-- hi\ndef n' : Nat := succ 0 -- trailing\n").decls
    assert d.name == "n'"


def test_alias_resolution():
    assert core("fun x^H => x", CHAIN) == T.Lam(H, T.Var(0))
    with pytest.raises(UnknownExtension):
        core("fun x^H => x", CFG)


def test_ua_level_is_closed():
    t = core("fun x^{ua} => x")
    assert t.level == frozenset({"ua", "funext"})


def test_illegal_annotation():
    with pytest.raises(IllegalLevel):
        core("fun x^{uip,ua} => x")


def test_unknown_identifier():
    with pytest.raises(ScopeError, match="foo"):
        core("foo")


def test_underscore_is_not_a_variable():
    with pytest.raises(ScopeError):
        core("fun _ => _")


def test_keywords_and_formers():
    t = core("Eq^{uip} Nat 2 (succ zero)")
    assert t == T.Eq(frozenset({"uip"}), T.Prim("Nat"), T.numeral(2), T.numeral(1))
    j = core("fun e => J e (fun y p => Unit) tt")
    assert isinstance(j.body, T.Elim) and j.body.kind == "J" and j.body.level == BASE
    assert core("K") == T.Gated("K")
    app = core("em Nat")
    assert app == T.App(T.Gated("em"), BASE, T.Prim("Nat"))


def test_former_arity_and_levels():
    with pytest.raises(ParseError, match="expects 2"):
        core("cons zero")
    with pytest.raises(ParseError, match="no level"):
        resolve_term(parse_term("succ zero^H"), CHAIN)
    with pytest.raises(ParseError):
        resolve_term(parse_term("absurd^H zero Nat"), CHAIN)


def test_duplicate_and_unknown_assertion():
    with pytest.raises(ScopeError, match="duplicate"):
        resolve(parse_module("def a :^{} Nat := 0\ndef a :^{} Nat := 1"), CFG)
    with pytest.raises(ScopeError):
        resolve(parse_module("assert_level nope <= {}"), CFG)


def test_sigma_binds_its_name():
    t = core("Sigma (x : Nat) (Eq Nat x x)")
    assert t == T.SigmaT(T.Prim("Nat"), T.Eq(BASE, T.Prim("Nat"), T.Var(0), T.Var(0)))


# -- printing ------------------------------------------------------------------------


def test_print_simple_round_trip():
    t = core("fun x => x")
    assert print_term(t) == "fun x => x"
    assert core(print_term(t)) == t


def test_print_prefers_aliases():
    t = core("fun x^L y^H => x", CHAIN)
    assert print_term(t, cfg=CHAIN) == "fun x^L y^H => x"


def test_print_eq_always_shows_level():
    t = core("Eq^{uip} Nat a b", scope=["a", "b"])
    assert print_term(t, ["a", "b"], CFG) == "Eq^{uip} Nat a b"
    assert print_term(core("Eq Nat 0 1"), cfg=CFG) == "Eq^{} Nat zero 1"


def test_print_avoids_capture():
    # a binder named like a free variable must be renamed
    t = T.Lam(BASE, T.App(T.Var(1), BASE, T.Var(0)), name="f")
    text = print_term(t, ["f"])
    assert text == "fun f1 => f f1"
    assert core(text, scope=["f"]) == t


def test_print_dependent_and_plain_arrows():
    t = core("(A : Type 0) -> A -> A")
    assert print_term(t) == "(A : Type 0) -> A -> A"
    hi = core("(P n^S)^H -> P n^S", CHAIN, ["P", "n"])
    text = print_term(hi, ["P", "n"], CHAIN)
    assert text == "(P n^S)^H -> P n^S"
    assert core(text, CHAIN, ["P", "n"]) == hi


@pytest.mark.parametrize("name", positive_files())
def test_corpus_round_trip(name):
    cfg = config_for(name)
    decls = resolved(name)
    text = print_declarations(decls, cfg)
    again = elaborate_module(parse_module(text), cfg, GlobalEnv())
    assert again == decls
