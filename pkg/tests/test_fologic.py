"""First-order layer: parsing, semantics on words, and compilation down to
DFAs.  The evaluator walks positions directly, so it doubles as the oracle
for the compiler."""

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from fragcheck.automata import equivalent, minimize, regex_to_dfa
from fragcheck.errors import CapError, InputError
from fragcheck.fologic import (
    And,
    Eq,
    Exists,
    Forall,
    Lab,
    Len,
    Lt,
    Mod,
    Not,
    Or,
    TrueF,
    and_all,
    compile_formula,
    eval_formula,
    formula_letters,
    formula_stats,
    free_vars,
    is_sentence,
    make_len,
    make_mod,
    or_all,
    parse_formula,
    parse_formula_document,
    to_sexp,
)

AA_SOMEWHERE = "(exists x (exists y (and (suc x y) (and (lab x a) (lab y a)))))"


def test_parse_basic_forms():
    f = parse_formula("(and (lab x a) (< x y))")
    assert isinstance(f, And)
    assert free_vars(f) == frozenset({"x", "y"})
    assert not is_sentence(f)
    g = parse_formula("(exists x (exists y (< x y)))")
    assert is_sentence(g)


def test_parse_macros_expand():
    # implication, biconditional and bounded comparison are sugar
    f = parse_formula("(-> (lab x a) (lab x b))")
    assert isinstance(f, Or)
    g = parse_formula("(<-> (lab x a) (lab x b))")
    assert eval_formula(Exists("x", g), "a") is False
    le = parse_formula("(exists x (exists y (<= x y)))")
    assert eval_formula(le, "ab")
    multi = parse_formula("(and true true true)")
    assert eval_formula(multi, "")
    labset = parse_formula("(exists x (lab x (a b)))")
    assert eval_formula(labset, "b") and not eval_formula(labset, "c")


def test_parse_rejects_malformed():
    for bad in ("", "(", "(foo x)", "(lab x)", "(mod x 0 1)",
                "(exists (lab x a))", "(exists x)", "true false"):
        with pytest.raises(InputError):
            parse_formula(bad)


def test_mod_and_len_normalization():
    assert make_mod("x", 3, 0).residue == 3
    assert make_len(2, 0).residue == 2
    with pytest.raises(InputError):
        make_mod("x", 3, 4)
    with pytest.raises(InputError):
        make_len(0, 0)
    assert parse_formula("(len 2 0)") == parse_formula("(len 2 2)")


def test_to_sexp_round_trip():
    texts = [
        "(exists x (and (lab x a) (mod x 2 1)))",
        "(forall x (or (lab x b) (len 3 1)))",
        "(not (exists x (= x x)))",
    ]
    for text in texts:
        f = parse_formula(text)
        assert parse_formula(to_sexp(f)) == f


def test_document_header_fixes_alphabet():
    alphabet, f = parse_formula_document("(alphabet a b c) (exists x (lab x a))")
    assert alphabet == ["a", "b", "c"]
    headless, g = parse_formula_document("(exists x (lab x a))")
    assert headless is None and g == f
    with pytest.raises(InputError):
        parse_formula_document("(alphabet a b) (lab x a) (lab x b)")


def test_eval_examples():
    f = parse_formula(AA_SOMEWHERE)
    assert eval_formula(f, "baab")
    assert not eval_formula(f, "bab")
    assert not eval_formula(f, "")
    assert eval_formula(make_len(2, 2), "")
    assert not eval_formula(make_len(2, 2), "b")
    # alternate even/odd positions with fixed letters, as in strict block codes
    alt = parse_formula(
        "(forall x (and (lab x (b c)) (<-> (mod x 2 1) (lab x b))))")
    assert eval_formula(alt, "bcbc")
    assert not eval_formula(alt, "cb")
    assert eval_formula(alt, "")


def test_eval_rejects_free_variables():
    with pytest.raises(InputError):
        eval_formula(parse_formula("(lab x a)"), "a")


def test_eval_is_boolean_homomorphism():
    f = parse_formula("(exists x (lab x a))")
    g = parse_formula("(len 2 2)")
    for w in oracles.words(("a", "b"), 4):
        fv, gv = eval_formula(f, w), eval_formula(g, w)
        assert eval_formula(And(f, g), w) == (fv and gv)
        assert eval_formula(Or(f, g), w) == (fv or gv)
        assert eval_formula(Not(f), w) == (not fv)


def test_and_or_all_fold():
    parts = [TrueF(), parse_formula("(len 2 2)")]
    assert eval_formula(and_all(parts), "aa")
    assert not eval_formula(and_all(parts), "a")
    assert eval_formula(or_all(parts), "a")
    assert eval_formula(or_all([]), "a") is False
    assert eval_formula(and_all([]), "a") is True


def test_compile_simple_sentences():
    d = compile_formula(parse_formula(AA_SOMEWHERE), ["a", "b"])
    ok, _ = equivalent(minimize(d), minimize(regex_to_dfa("(a|b)*aa(a|b)*")))
    assert ok
    d2 = compile_formula(parse_formula("(not (exists x true))"), ["a"])
    assert d2.accepts("") and not d2.accepts("a")


def test_compile_respects_declared_alphabet():
    with pytest.raises(InputError):
        compile_formula(parse_formula("(exists x (lab x c))"), ["a", "b"])


def test_compile_rejects_free_variables():
    with pytest.raises(InputError):
        compile_formula(parse_formula("(lab x a)"), ["a"])


def test_compile_state_cap():
    f = parse_formula(
        "(exists x (exists y (and (< x y) (and (mod x 7 1) (mod y 11 2)))))")
    with pytest.raises(CapError):
        compile_formula(f, ["a", "b"], state_cap=3)


def test_formula_stats_counts():
    f = parse_formula("(exists x (exists y (and (mod x 2 1) (< x y))))")
    stats = formula_stats(f)
    assert stats["variables"] == ["x", "y"]
    assert stats["variable_count"] == 2
    assert stats["uses_modular_predicates"] is True
    assert stats["prenex_blocks"] == ["exists"]
    mixed = formula_stats(parse_formula("(forall x (exists y (< x y)))"))
    assert mixed["prenex_blocks"] == ["forall", "exists"]
    assert mixed["uses_modular_predicates"] is False
    not_prenex = formula_stats(parse_formula("(not (exists x true))"))
    assert not_prenex["prenex_blocks"] is None
    assert formula_letters(parse_formula("(exists x (lab x (a c)))")) == {"a", "c"}


@given(word=st.lists(st.sampled_from("ab"), max_size=7).map("".join))
@settings(deadline=None)
def test_compile_matches_eval_modular(word):
    f = parse_formula(
        "(exists x (and (lab x a) (and (mod x 2 1) (len 2 2))))")
    d = compile_formula(f, ["a", "b"])
    assert d.accepts(word) == eval_formula(f, word)


@given(word=st.lists(st.sampled_from("ab"), max_size=7).map("".join))
@settings(deadline=None)
def test_compile_matches_eval_nested_quantifiers(word):
    f = parse_formula(
        "(forall x (-> (lab x a) (exists y (and (< x y) (lab y b)))))")
    d = compile_formula(f, ["a", "b"])
    assert d.accepts(word) == eval_formula(f, word)


def test_compile_matches_eval_battery():
    sentences = [
        "true",
        "false",
        "(len 3 3)",
        "(exists x (mod x 3 2))",
        "(forall x (or (lab x a) (mod x 2 2)))",
        "(exists x (forall y (<= y x)))",
        "(exists x (and (forall y (<= x y)) (lab x b)))",
        "(-> (exists x (lab x a)) (exists x (lab x b)))",
        "(exists x (exists y (and (suc x y) (and (lab x b) (lab y c)))))",
    ]
    for text in sentences:
        f = parse_formula(text)
        d = compile_formula(f, ["a", "b", "c"])
        for w in oracles.words(("a", "b", "c"), 4):
            assert d.accepts(w) == eval_formula(f, w), (text, w)
