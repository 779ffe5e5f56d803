"""Hand-built language expression instances shared by the combinator
tests and the acceptance suite.

Every VALID entry uses one modulus throughout (base block length and
product modulus agree), passes the validator with no violations, and
comes with an independent regular expression for the same language.
"""

from fragcheck.modprod import Base, CodetProd, DetProd, Union, make_base

ANY3 = frozenset({"a", "b", "c"})
ANY2 = frozenset({"a", "b"})

BC = make_base([{"b"}, {"c"}])                      # (bc)*
CB = make_base([{"c"}, {"b"}])                      # (cb)*
EVEN3 = make_base([ANY3, ANY3])                     # even length over a,b,c
EVEN2 = make_base([ANY2, ANY2])                     # even length over a,b
AA = make_base([{"a"}, {"a"}])                      # (aa)*
EPS2 = make_base([{"a"}, frozenset()])              # just the empty word

VALID = [
    (
        "blocks_bc",
        BC,
        ["b", "c"],
        "(bc)*",
    ),
    (
        "universal",
        make_base([ANY2]),
        ["a", "b"],
        "(a|b)*",
    ),
    (
        "even_length",
        EVEN2,
        ["a", "b"],
        "((a|b)(a|b))*",
    ),
    (
        "three_blocks",
        make_base([{"a"}, {"b"}, ANY2]),
        ["a", "b"],
        "(ab(a|b))*",
    ),
    (
        "marker_after_bc",
        DetProd(2, BC, "a", EVEN3),
        ["a", "b", "c"],
        "(bc)*a((a|b|c)(a|b|c))*",
    ),
    (
        "marker_before_bc",
        CodetProd(2, EVEN3, "a", BC),
        ["a", "b", "c"],
        "((a|b|c)(a|b|c))*a(bc)*",
    ),
    (
        "single_marker_mod1",
        DetProd(1, make_base([{"b"}]), "a", make_base([{"b"}])),
        ["a", "b"],
        "b*ab*",
    ),
    (
        "two_level",
        DetProd(2, DetProd(2, BC, "a", CB), "a", EVEN3),
        ["a", "b", "c"],
        "(bc)*a(cb)*a((a|b|c)(a|b|c))*",
    ),
    (
        "union_with_product",
        Union(BC, DetProd(2, BC, "a", BC)),
        ["a", "b", "c"],
        "(bc)*|(bc)*a(bc)*",
    ),
    (
        "union_over_aa",
        Union(AA, DetProd(2, AA, "b", AA)),
        ["a", "b"],
        "(aa)*|(aa)*b(aa)*",
    ),
    (
        "abc_blocks",
        DetProd(3, make_base([{"a"}, {"b"}, {"c"}]), "b", make_base([ANY3, ANY3, ANY3])),
        ["a", "b", "c"],
        "(abc)*b((a|b|c)(a|b|c)(a|b|c))*",
    ),
    (
        "empty_left_operand",
        DetProd(2, EPS2, "a", EVEN2),
        ["a", "b"],
        "a((a|b)(a|b))*",
    ),
    (
        "codet_inside_bc",
        CodetProd(2, BC, "b", BC),
        ["b", "c"],
        "(bc)*b(bc)*",
    ),
]

# expression, alphabet, rule expected somewhere in the violations
INVALID = [
    (
        DetProd(2, EVEN2, "a", make_base([ANY2])),
        ["a", "b"],
        "determinism",  # a occurs at odd positions of the even-length words
    ),
    (
        Union(make_base([{"a"}]), make_base([ANY2])),
        ["a", "b"],
        "disjoint",
    ),
    (
        DetProd(2, make_base([ANY2]), "a", make_base([ANY2])),
        ["a", "b"],
        "uniform-length",  # left operand has words of both parities
    ),
    (
        CodetProd(2, EVEN3, "c", BC),
        ["a", "b", "c"],
        "determinism",  # cbc has two suffixes of the form c(bc)*
    ),
    (
        DetProd(2, BC, "d", EVEN3),
        ["a", "b", "c"],
        "alphabet",
    ),
]
