from dataclasses import replace

import pytest

from lattc.elaborate import (
    check_declarations, check_source, contributions, default_annotations,
    elaborate_module, infer_level, required_level,
)
from lattc.errors import GateError, LevelJoinError, ScopeError
from lattc.kernel import GlobalEnv, check_declaration
from lattc.lattice import chain_config, default_config
from lattc.syntax.parser import parse_module
from lattc.syntax.surface import SLam, SLevel

from corpus_util import checked

CFG = default_config()
CHAIN = chain_config()


def decls(text, cfg=CFG, env=None):
    return elaborate_module(parse_module(text), cfg, env or GlobalEnv())


def one(text, cfg=CFG, env=None):
    (d,) = decls(text, cfg, env)
    return d


# -- defaults ------------------------------------------------------------------------


def test_unannotated_binder_becomes_base():
    (d,) = parse_module("def i : Nat -> Nat := fun x => x").decls
    filled = default_annotations(d)
    assert isinstance(filled.body, SLam)
    assert filled.body.binders[0].level == SLevel(())
    assert filled.type.level == SLevel(())


def test_unannotated_declaration_is_marked_for_inference():
    (d,) = parse_module("def i : Nat := 0").decls
    assert default_annotations(d).infer_level
    (d,) = parse_module("def i :^{cl} Nat := 0").decls
    assert not default_annotations(d).infer_level


def test_explicit_annotations_are_kept():
    (d,) = parse_module("def k :^H (x :^H Nat) -> Nat := fun x^H => x").decls
    filled = default_annotations(d)
    assert filled.body.binders[0].level.alias == "H"
    assert filled.type.level.alias == "H"


def test_assertions_pass_through():
    (d,) = parse_module("assert_level a <= {}").decls
    assert default_annotations(d) == d


def test_defaults_resolve_to_the_empty_level():
    d = one("def i : Nat -> Nat := fun x => x")
    assert d.body.level == frozenset()
    assert d.level is None


# -- inference -------------------------------------------------------------------------


def test_identity_is_at_base():
    d = one("def i : (A : Type 0) -> A -> A := fun A x => x")
    assert infer_level(GlobalEnv(), CFG, d) == frozenset()


def test_em_user_is_classical():
    d = one("def e : (A : Type 0) -> Sum A (A -> Void) := fun A => em A")
    assert infer_level(GlobalEnv(), CFG, d) == {"cl"}


def test_ua_user_also_needs_funext():
    d = one("def u : (A B : Type 0) -> Sigma (f : A -> B) (Sigma (g : B -> A) "
            "(Sigma (eta : (x : A) -> Eq A (g (f x)) x) ((y : B) -> Eq B (f (g y)) y)))"
            " -> Eq (Type 0) A B := fun A B e => ua_ax A B e")
    # The schema's equalities sit at the use-site observer, so annotate them there.
    d2 = one("def u : (A B : Type 0) -> Sigma (f : A -> B) (Sigma (g : B -> A) "
             "(Sigma (eta : (x : A) -> Eq^{ua} A (g (f x)) x) ((y : B) -> Eq^{ua} B (f (g y)) y)))"
             " -> Eq^{ua} (Type 0) A B := fun A B e => ua_ax A B e")
    assert required_level(GlobalEnv(), CFG, d) == {"ua", "funext"}
    assert infer_level(GlobalEnv(), CFG, d2) == {"ua", "funext"}


def test_k_with_ua_reports_both_contributions():
    d = one("def both : Nat := BoolElim true (fun _ => Nat) "
            "(K Nat 0 (fun _ => Nat) refl 0) (J^{} (ua_ax Nat Nat) (fun _ _ _ => Nat) 0)")
    found = {(occ.item, lvl) for occ, lvl in contributions(GlobalEnv(), CFG, d)}
    assert ("K", frozenset({"uip"})) in found
    assert ("ua_ax", frozenset({"ua", "funext"})) in found
    with pytest.raises(LevelJoinError) as info:
        infer_level(GlobalEnv(), CFG, d)
    assert "construct K needs {uip}" in info.value.message
    assert "construct ua_ax needs {funext,ua}" in info.value.message


def test_variables_count_only_when_accessed():
    d = one("def k :^{} (x :^H Nat) -> (y :^{} Nat) -> Nat := fun x^H y => y", CHAIN)
    assert required_level(GlobalEnv(), CHAIN, d) == frozenset()
    d = one("def k : (x :^H Nat) -> Nat := fun x^H => x", CHAIN)
    assert required_level(GlobalEnv(), CHAIN, d) == {"h"}


def test_arguments_grant_their_annotation():
    d = one("def f : ((x :^H Nat) -> Nat) -> (y :^H Nat) -> Nat := fun g y^H => g y^H", CHAIN)
    assert required_level(GlobalEnv(), CHAIN, d) == frozenset()


def test_inferred_level_rechecks():
    for name in ("base.ltc", "classical.ltc", "funext.ltc", "uip.ltc", "hidden_args.ltc"):
        result = checked(name)
        assert result.ok
        for d in result.declarations:
            if d.kind != "def":
                continue
            names = list(result.env.entries)
            prior = GlobalEnv({n: result.env.get(n) for n in names[:names.index(d.name)]})
            check_declaration(prior, CFG, replace(d, level=result.env.get(d.name).level))


def test_inference_is_order_independent():
    a = one("def x : Nat := BoolElim true (fun _ => Nat) (K Nat 0 (fun _ => Nat) refl 0) "
            "(SumElim^{cl} (em Nat) (fun _ => Nat) (fun n^{cl} => n) (fun _^{cl} => 0))")
    b = one("def x : Nat := BoolElim true (fun _ => Nat) "
            "(SumElim^{cl} (em Nat) (fun _ => Nat) (fun n^{cl} => n) (fun _^{cl} => 0)) "
            "(K Nat 0 (fun _ => Nat) refl 0)")
    assert infer_level(GlobalEnv(), CFG, a) == infer_level(GlobalEnv(), CFG, b) == {"uip", "cl"}


def test_explicit_level_too_low_is_a_gate_error():
    result = check_source("def e :^{} (A : Type 0) -> Sum A (A -> Void) := fun A => em A", CFG)
    assert isinstance(result.errors[0], GateError)


# -- assertions and the driver ----------------------------------------------------------


def test_assertions():
    text = ("def i : Nat -> Nat := fun x => x\n"
            "def e : (A : Type 0) -> Sum A (A -> Void) := fun A => em A\n"
            "assert_level i <= {}\n"
            "assert_level e <= {}\n"
            "assert_level e <= {cl,uip}\n")
    result = check_source(text, CFG)
    verdicts = [(o.assertion.name, o.assertion.ok) for o in result.outcomes if o.assertion]
    assert verdicts == [("i", True), ("e", False), ("e", True)]
    (failed,) = result.failed_assertions
    assert failed.offending == {"cl"}
    assert "FAILED" in str(failed) and "{cl}" in str(failed)
    assert not result.ok and not result.errors


def test_assertion_against_funext_through_ua():
    result = checked("funext.ltc")
    assert all(o.ok for o in result.outcomes)


def test_assertion_about_unknown_name():
    with pytest.raises(ScopeError, match="nope"):
        check_source("assert_level nope <= {}", CFG)


def test_stops_at_first_error_unless_keep_going():
    text = ("def a :^{} Nat := K Nat 0 (fun _ => Nat) refl 0\n"
            "def b :^{} Nat := em Nat\n"
            "def c : Nat := 3\n")
    first = check_source(text, CFG)
    assert len(first.outcomes) == 1
    everything = check_source(text, CFG, keep_going=True)
    assert [o.ok for o in everything.outcomes] == [False, False, True]
    assert "c" in everything.env


def test_errors_carry_spans():
    result = check_source("def a : Nat := 0\n\ndef b :^{} Nat := em Nat\n", CFG, file="f.ltc")
    (err,) = result.errors
    assert err.span.file == "f.ltc"
    assert err.span.location(None).startswith("f.ltc:3")


def test_check_declarations_on_an_existing_env():
    base = checked("base.ltc").env
    result = check_declarations(decls("def four : Nat := plus 2 2", env=base), CFG, base)
    assert result.ok and result.env.get("four").level == frozenset()
