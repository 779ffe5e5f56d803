"""Sequential composition of a finite monoid with a modular counter.

Elements are pairs (f, k) where k counts letters mod n and f maps each
counter value to a base element; the product twists the right factor by the
left counter:

    (f1, k1)(f2, k2) = (k -> f1(k) f2(k + k1), k1 + k2)      (counters mod n)

The order compares equal counters pointwise in the base order (equality when
the base is unordered).  `lift_decorated_hom` turns a morphism over
residue-decorated letters into one over plain letters valued in pairs;
`project_hom` goes back, spreading each pair over all counter offsets into
the n-fold power of the base.  The two directions are inverse enough to
transport definability: the implication tested by position-residue
decoration holds for the original morphism exactly when it holds through
the pair-valued lift.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .automata import DecoratedLetter, decorated_letters, mod1
from .errors import CapError, InputError
from .monoid import DEFAULT_MAX_MONOID, Morphism, OrderedMonoid, generated_morphism

DEFAULT_WREATH_CAP = 4096


def pair_product(base: OrderedMonoid, n: int, p1, p2):
    f1, k1 = p1
    f2, k2 = p2
    f = tuple(int(base.mult[f1[k], f2[(k + k1) % n]]) for k in range(n))
    return f, (k1 + k2) % n


def pair_le(base: OrderedMonoid, n: int, p1, p2) -> bool:
    f1, k1 = p1
    f2, k2 = p2
    if k1 != k2:
        return False
    if base.leq is None:
        return f1 == f2
    return all(bool(base.leq[f1[k], f2[k]]) for k in range(n))


def _check_pair(base: OrderedMonoid, n: int, pair):
    f, k = pair
    if len(f) != n or not 0 <= k < n:
        raise InputError(f"malformed pair {pair!r}")
    if not all(0 <= x < base.size for x in f):
        raise InputError(f"pair component outside the base monoid: {pair!r}")


@dataclass(frozen=True, eq=False)
class WreathMonoid:
    """The full pair monoid over a base and a counter modulus."""

    base: OrderedMonoid
    modulus: int
    monoid: OrderedMonoid
    pairs: tuple  # element id -> (f, k)

    def pair_of(self, x: int):
        return self.pairs[x]

    def index_of(self, pair) -> int:
        try:
            return self.pairs.index(pair)
        except ValueError:
            raise InputError(f"pair {pair!r} not in the wreath monoid") from None


def wreath_product(base: OrderedMonoid, n: int, cap: int = DEFAULT_WREATH_CAP) -> WreathMonoid:
    if n < 1:
        raise InputError("modulus must be at least 1")
    total = base.size**n * n
    if total > cap:
        raise CapError(f"wreath product would have {total} elements (cap {cap})")
    pairs = [
        (f, k) for f in itertools.product(range(base.size), repeat=n) for k in range(n)
    ]
    index = {p: i for i, p in enumerate(pairs)}
    mult = [
        [index[pair_product(base, n, p1, p2)] for p2 in pairs] for p1 in pairs
    ]
    leq = None
    if base.leq is not None:
        leq = [[pair_le(base, n, p1, p2) for p2 in pairs] for p1 in pairs]
    identity = index[(tuple([base.identity] * n), 0)]
    monoid = OrderedMonoid(mult, identity, leq=leq)
    return WreathMonoid(base=base, modulus=n, monoid=monoid, pairs=tuple(pairs))


@dataclass(frozen=True, eq=False)
class WreathMorphism:
    """A morphism from words into pair values over a base and modulus."""

    base: OrderedMonoid
    modulus: int
    morphism: Morphism  # into the generated submonoid of pairs
    pairs: tuple  # element id -> (f, k)

    def pair_of(self, x: int):
        return self.pairs[x]

    def pair_image(self, word):
        return self.pairs[self.morphism.image(word)]


def wreath_morphism(
    base: OrderedMonoid,
    n: int,
    letter_pairs: dict,
    cap: int = DEFAULT_MAX_MONOID,
) -> WreathMorphism:
    """The submonoid of pairs generated by the letter images."""
    if n < 1:
        raise InputError("modulus must be at least 1")
    for pair in letter_pairs.values():
        _check_pair(base, n, pair)
    identity = (tuple([base.identity] * n), 0)
    morphism = generated_morphism(
        sorted(letter_pairs),
        dict(letter_pairs),
        lambda p1, p2: pair_product(base, n, p1, p2),
        identity,
        cap=cap,
        leq_label=lambda p1, p2: pair_le(base, n, p1, p2),
    )
    labels = _element_pairs(morphism, letter_pairs, base, n, identity)
    return WreathMorphism(base=base, modulus=n, morphism=morphism, pairs=labels)


def _element_pairs(morphism: Morphism, letter_pairs, base, n, identity) -> tuple:
    out = []
    for x in morphism.monoid.elements():
        pair = identity
        for a in morphism.word_of(x):
            pair = pair_product(base, n, pair, letter_pairs[a])
        out.append(pair)
    return tuple(out)


def lift_decorated_hom(g: Morphism, n: int, cap: int = DEFAULT_MAX_MONOID) -> WreathMorphism:
    """From a morphism over residue-decorated letters to a pair-valued
    morphism over the plain letters: the function component of a letter
    records its image at every counter offset, the counter advances by one.

    Satisfies pair_image(u) = (f, |u| mod n) with f(0) the image of the
    decorated u under g."""
    if n < 1:
        raise InputError("modulus must be at least 1")
    bases = sorted({DecoratedLetter.parse(a).base for a in g.alphabet})
    expected = set(decorated_letters(bases, n))
    if set(g.alphabet) != expected:
        missing = sorted(expected - set(g.alphabet))
        raise InputError(
            f"alphabet is not a full decorated alphabet for modulus {n}; "
            f"missing {', '.join(missing[:4])}"
        )
    letter_pairs = {
        a: (
            tuple(g.letter_map[DecoratedLetter(a, k + 1).text] for k in range(n)),
            1 % n,  # one letter advances the counter by one
        )
        for a in bases
    }
    return wreath_morphism(g.monoid, n, letter_pairs, cap=cap)


def project_hom(
    lifted: WreathMorphism, d: int | None = None, cap: int = DEFAULT_MAX_MONOID
) -> Morphism:
    """From a pair-valued morphism over plain letters to a morphism over
    decorated letters, valued in the n-fold power of the base.

    Every letter must advance the counter by the same amount d (supplied or
    inferred); the decorated letter (a, i) acts at offset (i-1)d.  The first
    component of the image of a decorated word recovers the pair morphism's
    function component at 0."""
    base = lifted.base
    n = lifted.modulus
    hom = lifted.morphism
    shifts = {a: lifted.pair_of(hom.letter_map[a])[1] for a in hom.alphabet}
    distinct = sorted(set(shifts.values()))
    if len(distinct) != 1:
        raise InputError("letters with unequal second components cannot be projected")
    inferred = distinct[0]
    if d is None:
        d = inferred
    elif d != inferred:
        raise InputError(f"letters advance the counter by {inferred}, not {d}")

    letter_labels = {}
    for a in hom.alphabet:
        f = lifted.pair_of(hom.letter_map[a])[0]
        for i in range(1, n + 1):
            letter_labels[DecoratedLetter(a, i).text] = tuple(
                f[(k + (i - 1) * d) % n] for k in range(n)
            )

    identity = tuple([base.identity] * n)

    def mult_label(t1, t2):
        return tuple(int(base.mult[t1[k], t2[k]]) for k in range(n))

    leq_label = None
    if base.leq is not None:
        leq_label = lambda t1, t2: all(bool(base.leq[t1[k], t2[k]]) for k in range(n))

    return generated_morphism(
        sorted(letter_labels),
        letter_labels,
        mult_label,
        identity,
        cap=cap,
        leq_label=leq_label,
    )


def offset_shift_hom(g: Morphism, n: int, j: int) -> Morphism:
    """Precompose a decorated-letter morphism with the residue shift by j:
    the letter (a, i) maps to g's image of (a, i+j)."""
    letter_map = {}
    for text in g.alphabet:
        dl = DecoratedLetter.parse(text)
        letter_map[text] = g.letter_map[DecoratedLetter(dl.base, mod1(dl.residue + j, n)).text]
    return Morphism(
        monoid=g.monoid,
        alphabet=g.alphabet,
        letter_map=letter_map,
        accepting=g.accepting,
    )


def offset_product_hom(g: Morphism, n: int, cap: int = DEFAULT_MAX_MONOID) -> Morphism:
    """The direct product of all residue shifts of g, valued in the n-fold
    power of g's monoid ordered pointwise.  Component j of the image of a
    decorated word is g's image of the word re-decorated at offset j."""
    base = g.monoid
    letter_labels = {}
    for text in g.alphabet:
        dl = DecoratedLetter.parse(text)
        letter_labels[text] = tuple(
            g.letter_map[DecoratedLetter(dl.base, mod1(dl.residue + j, n)).text]
            for j in range(n)
        )
    identity = tuple([base.identity] * n)

    def mult_label(t1, t2):
        return tuple(int(base.mult[t1[k], t2[k]]) for k in range(n))

    leq_label = None
    if base.leq is not None:
        leq_label = lambda t1, t2: all(bool(base.leq[t1[k], t2[k]]) for k in range(n))

    return generated_morphism(
        sorted(letter_labels),
        letter_labels,
        mult_label,
        identity,
        cap=cap,
        leq_label=leq_label,
    )
