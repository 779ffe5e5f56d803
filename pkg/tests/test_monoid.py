"""Ordered monoids, syntactic morphisms, Green's relations and the local
submonoid conditions."""

import numpy as np
import pytest

import oracles
from fragcheck.automata import minimize, regex_to_dfa
from fragcheck.errors import CapError, InputError
from fragcheck.monoid import (
    GreenRelations,
    Morphism,
    OrderedMonoid,
    format_word,
    generated_morphism,
    green_classes,
    is_aperiodic,
    j_upset,
    local_condition,
    me_submonoid,
    monoid_to_text,
    set_product,
    submonoid_closure,
    submonoid_view,
    syntactic_order,
    transition_monoid,
)
from fragcheck.stability import stability_info


def syntactic(pattern, **kw):
    return syntactic_order(transition_monoid(minimize(regex_to_dfa(pattern)), **kw))


def test_format_word():
    assert format_word(()) == "ε"
    assert format_word(("a", "b")) == "ab"
    assert format_word(("aa", "b")) == "aa b"


def test_ordered_monoid_basics():
    z3 = OrderedMonoid([[0, 1, 2], [1, 2, 0], [2, 0, 1]], 0)
    assert z3.size == 3
    assert z3.mul(1, 2) == 0
    assert z3.product([1, 1, 1]) == 0
    assert list(z3.idempotents()) == [0]
    assert z3.omega(1) == 0
    assert not z3.is_idempotent(2)
    assert z3.leq is None


def test_ordered_monoid_rejects_bad_tables():
    with pytest.raises(InputError):
        OrderedMonoid([[0, 1], [1, 1]], 1)  # 1 is not an identity
    with pytest.raises(InputError):
        OrderedMonoid([[1, 0], [0, 1]], 0)  # identity row broken
    with pytest.raises(InputError):
        # x(yz) = (xy)z fails for this table
        OrderedMonoid([[0, 1, 2], [1, 0, 0], [2, 2, 1]], 0)
    with pytest.raises(InputError):
        OrderedMonoid([[0, 1], [1, 0]], 0, leq=[[True, True], [True, True]])


def test_with_order_keeps_table():
    u1 = OrderedMonoid([[0, 1], [1, 1]], 0)
    ordered = u1.with_order([[True, False], [True, True]])
    assert ordered.le(1, 0) and not ordered.le(0, 1)
    assert np.array_equal(ordered.mult, u1.mult)


def test_transition_monoid_of_aa_factor_language():
    h = transition_monoid(minimize(regex_to_dfa("(a|b)*aa(a|b)*")))
    m = h.monoid
    assert m.size == 6
    # aba collapses to a, bab to b, and aa is the absorbing accepting element
    assert h.image("aba") == h.image("a")
    assert h.image("bab") == h.image("b")
    zero = h.image("aa")
    assert all(m.mul(zero, x) == zero == m.mul(x, zero) for x in m.elements())
    assert h.accepting == frozenset({zero})
    assert h.image("babaab") in h.accepting


def test_transition_monoid_word_of_is_shortlex():
    h = transition_monoid(minimize(regex_to_dfa("(a|b)*aa(a|b)*")))
    assert h.word_of(h.monoid.identity) == ()
    assert h.word_of(h.image("aa")) == ("a", "a")
    assert h.word_of(h.image("ab")) == ("a", "b")


def test_transition_monoid_cap():
    with pytest.raises(CapError):
        transition_monoid(minimize(regex_to_dfa("(a|b)*aa(a|b)*")), max_monoid=3)


def test_generated_morphism_modular_counter():
    h = generated_morphism(
        ("a",), {"a": 1}, lambda x, y: (x + y) % 3, 0,
        accepting_label=lambda x: x == 0)
    assert h.monoid.size == 3
    assert h.image("aaa") == h.monoid.identity
    assert h.accepting == frozenset({0})


def test_generated_morphism_cap():
    with pytest.raises(CapError):
        generated_morphism(("a",), {"a": 1}, lambda x, y: (x + y) % 64, 0, cap=10)


def test_syntactic_order_zero_positions():
    # accepting absorbing zero sits at the bottom of the syntactic order
    h = syntactic("(a|b)*(aa|bb)(a|b)*")
    zero = h.image("aa")
    assert all(h.monoid.le(zero, x) for x in h.monoid.elements())
    # non-accepting absorbing zero sits at the top
    g = syntactic("(bc)*")
    sink = g.image("bb")
    assert all(g.monoid.mul(sink, x) == sink for x in g.monoid.elements())
    assert all(g.monoid.le(x, sink) for x in g.monoid.elements())


def test_syntactic_order_is_idempotent_and_in_place():
    h = transition_monoid(minimize(regex_to_dfa("(a|b)*aa(a|b)*")))
    assert h.monoid.leq is None
    h2 = syntactic_order(h)
    assert h2 is h and h.monoid.leq is not None
    before = h.monoid.leq
    assert syntactic_order(h) is h
    assert h.monoid.leq is before


def test_syntactic_order_needs_accepting_set():
    h = generated_morphism(("a",), {"a": 1}, lambda x, y: (x + y) % 2, 0)
    with pytest.raises(InputError):
        syntactic_order(h)


def test_syntactic_order_rejects_non_syntactic_morphism():
    # all elements share every context when everything is accepting
    h = generated_morphism(
        ("a",), {"a": 1}, lambda x, y: (x + y) % 2, 0,
        accepting_label=lambda x: True)
    with pytest.raises(InputError):
        syntactic_order(h)


def test_is_aperiodic():
    ok, _ = is_aperiodic(syntactic("(a|b)*(aa|bb)(a|b)*").monoid)
    assert ok
    h = syntactic("(b*ab*a)*b*")
    ok, witness = is_aperiodic(h.monoid)
    assert not ok
    assert witness == h.image("a")


def test_set_product():
    m = syntactic("(bc)*").monoid
    xs = frozenset({m.identity})
    assert set_product(m, xs, xs) == xs
    everything = set_product(m, frozenset(m.elements()), frozenset(m.elements()))
    assert everything == frozenset(m.elements())


def test_green_relations_on_aa_factor():
    h = syntactic("(a|b)*aa(a|b)*")
    m = h.monoid
    g = green_classes(m)
    assert isinstance(g, GreenRelations)
    one, a, b = m.identity, h.image("a"), h.image("b")
    ab, ba, zero = h.image("ab"), h.image("ba"), h.image("aa")
    # J-classes: {1}, the four products of a and b, and the zero
    assert set(map(frozenset, g.j_classes)) == {
        frozenset({one}), frozenset({a, b, ab, ba}), frozenset({zero})}
    # a R ab and a L ba, but a and b are not R-related
    assert g.r_leq[a, ab] and g.r_leq[ab, a]
    assert g.l_leq[a, ba] and g.l_leq[ba, a]
    assert not (g.r_leq[a, b] and g.r_leq[b, a])
    # H refines R and L
    assert np.array_equal(g.h_leq, g.r_leq & g.l_leq)


def test_green_h_classes_match_r_and_l(small_corpus):
    for d in small_corpus[:12]:
        m = transition_monoid(d, max_monoid=600).monoid
        g = green_classes(m)
        r_eq = g.r_leq & g.r_leq.T
        l_eq = g.l_leq & g.l_leq.T
        h_eq = g.h_leq & g.h_leq.T
        assert np.array_equal(h_eq, r_eq & l_eq)


def test_j_upset_and_submonoid_closure():
    h = syntactic("(a|b)*aa(a|b)*")
    m = h.monoid
    assert j_upset(m, m.identity) == frozenset({m.identity})
    assert j_upset(m, h.image("aa")) == frozenset(m.elements())
    assert submonoid_closure(m, [h.image("a")]) == frozenset(
        {m.identity, h.image("a"), h.image("aa")})


def test_me_submonoid():
    h = syntactic("(a|b)*aa(a|b)*")
    m = h.monoid
    assert me_submonoid(m, m.identity) == frozenset({m.identity})
    assert me_submonoid(m, h.image("aa")) == frozenset(m.elements())
    with pytest.raises(InputError):
        me_submonoid(m, h.image("a"))  # not idempotent


def test_me_submonoid_contains_identity_and_is_closed(small_corpus):
    for d in small_corpus[:12]:
        m = transition_monoid(d, max_monoid=600).monoid
        for e in m.idempotents():
            sub = me_submonoid(m, e)
            assert m.identity in sub
            assert set_product(m, sub, sub) == sub


def test_submonoid_view_round_trip():
    h = syntactic("(a|b)*aa(a|b)*")
    m = h.monoid
    elements = submonoid_closure(m, [h.image("a")])
    view, parents = submonoid_view(m, elements)
    assert view.size == len(elements)
    assert set(parents) == set(elements)
    for x in range(view.size):
        for y in range(view.size):
            assert parents[view.mul(x, y)] == m.mul(parents[x], parents[y])
    # order restricts along the same embedding
    for x in range(view.size):
        for y in range(view.size):
            assert view.le(x, y) == m.le(parents[x], parents[y])


def test_submonoid_view_requires_closed_subset():
    h = syntactic("(a|b)*aa(a|b)*")
    with pytest.raises(InputError):
        submonoid_view(h.monoid, {h.monoid.identity, h.image("a")})


def test_local_condition_on_repeat_language():
    h = syntactic("(a|b)*(aa|bb)(a|b)*")
    ok, _ = local_condition(h.monoid, "leq", "Me")
    assert ok
    ok, witness = local_condition(h.monoid, "eq", "Me")
    assert not ok
    e, x = witness
    assert h.word_of(e) == ("a", "b")
    assert h.word_of(x) == ("a",)
    exe = h.monoid.mul(h.monoid.mul(e, x), e)
    assert exe != e


def test_local_condition_mes_selector():
    h = syntactic("(bc)*")
    info = stability_info(h)
    ok, _ = local_condition(h.monoid, "eq", "Mes", info)
    assert ok
    with pytest.raises(InputError):
        local_condition(h.monoid, "eq", "Mes")  # stability data missing
    other = syntactic("(a|b)*aa(a|b)*")
    with pytest.raises(InputError):
        local_condition(other.monoid, "eq", "Mes", info)  # wrong monoid


def test_local_condition_rejects_unknown_inputs():
    h = syntactic("(bc)*")
    with pytest.raises(InputError):
        local_condition(h.monoid, "lt", "Me")
    with pytest.raises(InputError):
        local_condition(h.monoid, "eq", "M")
    bare = generated_morphism(("a",), {"a": 1}, lambda x, y: (x + y) % 2, 0)
    with pytest.raises(InputError):
        local_condition(bare.monoid, "leq", "Me")  # no order bound


def test_syntactic_order_compatible_with_product(small_corpus):
    # x <= y and u <= v force xu <= yv
    for d in small_corpus[:8]:
        m = syntactic_order(transition_monoid(d, max_monoid=600)).monoid
        if m.size > 24:
            continue
        leq = m.leq
        for x in range(m.size):
            for y in range(m.size):
                if not leq[x, y]:
                    continue
                for u in range(m.size):
                    for v in range(m.size):
                        if leq[u, v]:
                            assert leq[m.mul(x, u), m.mul(y, v)]


def test_syntactic_morphism_recognizes_language(small_corpus):
    # membership only depends on the image under the syntactic morphism
    for d in small_corpus[:10]:
        h = transition_monoid(d, max_monoid=600)
        for w in oracles.words(d.alphabet, 5):
            assert (h.image(w) in h.accepting) == d.accepts(w)


def test_morphism_rejects_incomplete_letter_map():
    z2 = OrderedMonoid([[0, 1], [1, 0]], 0)
    with pytest.raises(InputError):
        Morphism(monoid=z2, alphabet=("a", "b"), letter_map={"a": 1})
    with pytest.raises(InputError):
        Morphism(monoid=z2, alphabet=("a",), letter_map={"a": 5})


def test_monoid_to_text_mentions_elements():
    h = syntactic("(bc)*")
    text = monoid_to_text(h)
    assert "bc" in text
    assert "ε" in text
