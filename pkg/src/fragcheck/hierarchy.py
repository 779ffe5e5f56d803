"""Alternation levels over the stable monoid.

Two congruences drive the analysis.  Writing E(M) for the idempotents, two
elements x, y are equivalent on the K side when ex = ey for every idempotent
e whose right ideal survives multiplication (e in exM), and both products
fall strictly below e otherwise; the D side is the mirror image with xe and
left ideals.  Quotienting by one side and then re-checking stable Green
triviality on the other yields the level of a language in the two
alternation hierarchies: level 2 is stable R-triviality (or L-triviality on
the opposite side), level k+1 allows one more quotient step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, InputError
from .monoid import Morphism, OrderedMonoid
from .stability import is_stable_trivial, stability_info

_SIDES = ("K", "D")


@dataclass(frozen=True, eq=False)
class CongruenceQuotient:
    source: Morphism
    side: str
    classes: tuple  # tuple of tuples of source element ids
    class_of: tuple  # source element id -> class id
    quotient: Morphism


def sim_quotient(m: Morphism, side: str) -> CongruenceQuotient:
    """Quotient by the idempotent-signature congruence of the given side."""
    if side not in _SIDES:
        raise InputError(f"unknown side {side!r}, expected K or D")
    mon = m.monoid
    size, mult = mon.size, mon.mult
    idems = mon.idempotents()

    right_has = np.zeros((size, size), dtype=bool)  # right_has[y][x] iff x in yM
    left_has = np.zeros((size, size), dtype=bool)  # left_has[y][x] iff x in My
    for y in range(size):
        right_has[y, mult[y]] = True
        left_has[y, mult[:, y]] = True

    below = -1  # signature entry for "strictly below e"
    sigs = []
    for x in range(size):
        parts = []
        for e in idems:
            y = int(mult[e, x]) if side == "K" else int(mult[x, e])
            survives = right_has[y, e] if side == "K" else left_has[y, e]
            parts.append(y if survives else below)
        sigs.append(tuple(parts))

    index: dict = {}
    class_of = [index.setdefault(s, len(index)) for s in sigs]
    k = len(index)
    classes: list[list[int]] = [[] for _ in range(k)]
    for x, c in enumerate(class_of):
        classes[c].append(x)

    cls = np.asarray(class_of, dtype=np.int64)
    qc = cls[mult]  # class of x y
    reps = np.asarray([members[0] for members in classes], dtype=np.int64)
    qmult = qc[np.ix_(reps, reps)]
    if not np.array_equal(qc, qmult[cls[:, None], cls[None, :]]):
        raise ConsistencyError(
            f"the {side}-side signature relation failed to be a congruence"
        )

    words = [
        min((mon.word_of(x) for x in members), key=lambda w: (len(w), w))
        for members in classes
    ]
    accepting = None
    if m.accepting is not None:
        accepting = frozenset(class_of[x] for x in m.accepting)
    quotient_monoid = OrderedMonoid(qmult, class_of[mon.identity], repr_words=words)
    quotient = Morphism(
        monoid=quotient_monoid,
        alphabet=m.alphabet,
        letter_map={a: class_of[x] for a, x in m.letter_map.items()},
        accepting=accepting,
    )
    return CongruenceQuotient(
        source=m,
        side=side,
        classes=tuple(tuple(c) for c in classes),
        class_of=tuple(class_of),
        quotient=quotient,
    )


@dataclass(frozen=True)
class WvLevels:
    """Levels in the two alternation hierarchies (None when the cap was
    reached), with the monoid sizes along each quotient chain."""

    w: int | None
    v: int | None
    w_sizes: tuple
    v_sizes: tuple


def _side_level(m: Morphism, first: str, max_level: int):
    cur = m
    sizes = [cur.monoid.size]
    rel = first
    stalls = 0
    for t in range(max(0, max_level - 1)):
        info = stability_info(cur)
        ok, _ = is_stable_trivial(info, rel)
        if ok:
            return t + 2, tuple(sizes)
        side = "K" if rel == "Rs" else "D"
        nxt = sim_quotient(cur, side).quotient
        stalls = stalls + 1 if nxt.monoid.size == cur.monoid.size else 0
        if stalls >= 2:
            # a full two-sided round without collapse cannot make progress
            return None, tuple(sizes)
        cur = nxt
        sizes.append(cur.monoid.size)
        rel = "Ls" if rel == "Rs" else "Rs"
    return None, tuple(sizes)


def wv_level(m: Morphism, max_level: int = 16) -> WvLevels:
    """The least levels at which the stable monoid of the iterated quotients
    becomes R-trivial (W side, starting from R) or L-trivial (V side)."""
    w, w_sizes = _side_level(m, "Rs", max_level)
    v, v_sizes = _side_level(m, "Ls", max_level)
    return WvLevels(w=w, v=v, w_sizes=w_sizes, v_sizes=v_sizes)
