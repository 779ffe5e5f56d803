"""Complete deterministic finite automata, plus the position-residue decoration.

Serialized letters are strings ("a", or "a@2" for the letter a carrying
position residue 2).  The algorithms only need letters to be hashable and
mutually sortable, which lets the formula compiler reuse them over
structured marker letters before projecting back to plain strings.

Residues of positions and lengths follow the 1..n convention throughout:
"i mod n" means the unique k in {1, ..., n} congruent to i.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import CapError, InputError

Word = tuple  # tuple of letters

DEFAULT_STATE_CAP = 200_000


def mod1(i: int, n: int) -> int:
    """The unique k in {1, ..., n} with k congruent to i mod n."""
    return (i - 1) % n + 1


class DecoratedLetter(NamedTuple):
    base: str
    residue: int

    @property
    def text(self) -> str:
        return f"{self.base}@{self.residue}"

    @classmethod
    def parse(cls, text: str) -> "DecoratedLetter":
        base, sep, res = text.rpartition("@")
        if not sep or not base or not res.isdigit():
            raise InputError(f"not a decorated letter: {text!r}")
        return cls(base, int(res))


@dataclass(frozen=True, eq=False)
class Dfa:
    """A complete DFA.  `delta` maps every (state, letter) pair to a state."""

    alphabet: tuple
    states: tuple
    initial: object
    finals: frozenset
    delta: dict

    def __post_init__(self):
        if not self.alphabet:
            raise InputError("empty alphabet")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise InputError("duplicate letters in alphabet")
        if not self.states or len(set(self.states)) != len(self.states):
            raise InputError("states must be nonempty and unique")
        state_set = set(self.states)
        if self.initial not in state_set:
            raise InputError("initial state not among states")
        if not self.finals <= state_set:
            raise InputError("final states not among states")
        expected = {(q, a) for q in self.states for a in self.alphabet}
        if set(self.delta) != expected:
            missing = expected - set(self.delta)
            extra = set(self.delta) - expected
            if missing:
                q, a = sorted(missing, key=repr)[0]
                raise InputError(f"incomplete delta: no transition from {q!r} on {a!r}")
            q, a = sorted(extra, key=repr)[0]
            raise InputError(f"transition from unknown state/letter pair ({q!r}, {a!r})")
        for (q, a), t in self.delta.items():
            if t not in state_set:
                raise InputError(f"transition target {t!r} not among states")

    def run(self, word: Iterable, start=None):
        q = self.initial if start is None else start
        for a in word:
            if (q, a) not in self.delta:
                raise InputError(f"letter {a!r} outside alphabet")
            q = self.delta[(q, a)]
        return q

    def accepts(self, word: Iterable) -> bool:
        return self.run(word) in self.finals


def make_dfa(alphabet, states, initial, finals, transitions) -> Dfa:
    """Build a Dfa from a transition mapping {(state, letter): state}."""
    return Dfa(
        alphabet=tuple(alphabet),
        states=tuple(states),
        initial=initial,
        finals=frozenset(finals),
        delta=dict(transitions),
    )


# ---------------------------------------------------------------------------
# JSON documents

_DFA_FIELDS = ("alphabet", "states", "initial", "finals", "transitions")


def parse_dfa(text: str) -> Dfa:
    """Parse the JSON DFA document described in docs/formats.md."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("DFA document must be a JSON object")
    for field in _DFA_FIELDS:
        if field not in doc:
            raise InputError(f"missing field {field!r}")
    for field in doc:
        if field not in _DFA_FIELDS:
            raise InputError(f"unexpected field {field!r}")
    alphabet = doc["alphabet"]
    states = doc["states"]
    if not isinstance(alphabet, list) or not all(isinstance(a, str) and a for a in alphabet):
        raise InputError("alphabet must be a list of nonempty strings")
    if not isinstance(states, list) or not all(isinstance(q, str) for q in states):
        raise InputError("states must be a list of strings")
    finals = doc["finals"]
    if not isinstance(finals, list) or not all(isinstance(q, str) for q in finals):
        raise InputError("finals must be a list of strings")
    state_set = set(states)
    letter_set = set(alphabet)
    for q in finals:
        if q not in state_set:
            raise InputError(f"unknown state {q!r} in finals")
    initial = doc["initial"]
    if initial not in state_set:
        raise InputError(f"unknown initial state {initial!r}")
    delta = {}
    if not isinstance(doc["transitions"], list):
        raise InputError("transitions must be a list of [src, letter, dst] triples")
    for item in doc["transitions"]:
        if not (isinstance(item, list) and len(item) == 3):
            raise InputError(f"bad transition entry: {item!r}")
        src, letter, dst = item
        if src not in state_set:
            raise InputError(f"unknown state {src!r} in transition")
        if dst not in state_set:
            raise InputError(f"unknown state {dst!r} in transition")
        if letter not in letter_set:
            raise InputError(f"unknown letter {letter!r} in transition")
        if (src, letter) in delta:
            raise InputError(f"duplicate transition from {src!r} on {letter!r}")
        delta[(src, letter)] = dst
    return make_dfa(alphabet, states, initial, finals, delta)


def dfa_to_doc(d: Dfa) -> dict:
    d = _stringly(d)
    return {
        "alphabet": list(d.alphabet),
        "states": list(d.states),
        "initial": d.initial,
        "finals": [q for q in d.states if q in d.finals],
        "transitions": [[q, a, d.delta[(q, a)]] for q in d.states for a in d.alphabet],
    }


def dfa_to_json(d: Dfa) -> str:
    return json.dumps(dfa_to_doc(d), indent=2)


def _stringly(d: Dfa) -> Dfa:
    """Rename states to q0, q1, ... unless they already are plain strings."""
    if all(isinstance(q, str) for q in d.states) and all(
        isinstance(a, str) for a in d.alphabet
    ):
        return d
    letters = sorted(d.alphabet)
    order = [d.initial]
    names = {d.initial: "q0"}
    for q in order:
        for a in letters:
            t = d.delta[(q, a)]
            if t not in names:
                names[t] = f"q{len(order)}"
                order.append(t)
    delta = {(names[q], a): names[d.delta[(q, a)]] for q in order for a in letters}
    finals = [names[q] for q in order if q in d.finals]
    return make_dfa(letters, [names[q] for q in order], "q0", finals, delta)


# ---------------------------------------------------------------------------
# Minimization and canonical naming

def minimize(d: Dfa) -> Dfa:
    """Minimal complete DFA with canonically named, BFS-ordered states.

    The result is the unique minimal automaton of the language: states are
    named q0, q1, ... in breadth-first order from the initial state with
    letters taken in sorted order, so equal languages yield identical
    documents byte for byte.
    """
    letters = sorted(d.alphabet)
    reachable = [d.initial]
    seen = {d.initial}
    for q in reachable:
        for a in letters:
            t = d.delta[(q, a)]
            if t not in seen:
                seen.add(t)
                reachable.append(t)

    # Moore partition refinement over the reachable part.
    block = {q: (q in d.finals) for q in reachable}
    while True:
        sig = {
            q: (block[q], tuple(block[d.delta[(q, a)]] for a in letters))
            for q in reachable
        }
        ids = {}
        new_block = {}
        for q in reachable:
            new_block[q] = ids.setdefault(sig[q], len(ids))
        if len(ids) == len(set(block.values())):
            block = new_block
            break
        block = new_block

    # Canonical rename by BFS over the quotient.
    order = []
    names = {}

    def visit(b):
        if b not in names:
            names[b] = f"q{len(order)}"
            order.append(b)

    rep = {}
    for q in reachable:
        rep.setdefault(block[q], q)
    visit(block[d.initial])
    for b in order:
        for a in letters:
            visit(block[d.delta[(rep[b], a)]])

    delta = {
        (names[b], a): names[block[d.delta[(rep[b], a)]]] for b in order for a in letters
    }
    finals = frozenset(names[b] for b in order if rep[b] in d.finals)
    return make_dfa(letters, [names[b] for b in order], names[order[0]], finals, delta)


def equivalent(d1: Dfa, d2: Dfa) -> tuple[bool, Word | None]:
    """Language equality, with a shortest (then lexicographically least)
    distinguishing word when the languages differ."""
    _require_same_alphabet(d1, d2)
    letters = sorted(d1.alphabet)
    start = (d1.initial, d2.initial)
    seen = {start: ()}
    queue = deque([start])
    while queue:
        q1, q2 = queue.popleft()
        word = seen[(q1, q2)]
        if (q1 in d1.finals) != (q2 in d2.finals):
            return False, word
        for a in letters:
            nxt = (d1.delta[(q1, a)], d2.delta[(q2, a)])
            if nxt not in seen:
                seen[nxt] = word + (a,)
                queue.append(nxt)
    return True, None


def _require_same_alphabet(d1: Dfa, d2: Dfa):
    if set(d1.alphabet) != set(d2.alphabet):
        raise InputError(
            f"alphabet mismatch: {sorted(d1.alphabet)!r} vs {sorted(d2.alphabet)!r}"
        )


# ---------------------------------------------------------------------------
# Boolean operations

def boolean_op(op: str, d1: Dfa, d2: Dfa | None = None) -> Dfa:
    if op == "complement":
        if d2 is not None:
            raise InputError("complement takes a single automaton")
        return minimize(
            make_dfa(
                d1.alphabet,
                d1.states,
                d1.initial,
                set(d1.states) - d1.finals,
                d1.delta,
            )
        )
    if op not in ("intersect", "union"):
        raise InputError(f"unknown boolean operation {op!r}")
    if d2 is None:
        raise InputError(f"{op} takes two automata")
    _require_same_alphabet(d1, d2)
    letters = sorted(d1.alphabet)
    start = (d1.initial, d2.initial)
    states = [start]
    seen = {start}
    delta = {}
    for pair in states:
        q1, q2 = pair
        for a in letters:
            nxt = (d1.delta[(q1, a)], d2.delta[(q2, a)])
            delta[(pair, a)] = nxt
            if nxt not in seen:
                seen.add(nxt)
                states.append(nxt)
    if op == "intersect":
        finals = [(q1, q2) for (q1, q2) in states if q1 in d1.finals and q2 in d2.finals]
    else:
        finals = [(q1, q2) for (q1, q2) in states if q1 in d1.finals or q2 in d2.finals]
    return minimize(make_dfa(letters, states, start, finals, delta))


def complement(d: Dfa) -> Dfa:
    return boolean_op("complement", d)


def intersect(d1: Dfa, d2: Dfa) -> Dfa:
    return boolean_op("intersect", d1, d2)


def union(d1: Dfa, d2: Dfa) -> Dfa:
    return boolean_op("union", d1, d2)


def is_empty(d: Dfa) -> bool:
    return shortest_accepted(d) is None


def shortest_accepted(d: Dfa) -> Word | None:
    """A shortest accepted word (lexicographically least among those), or None."""
    letters = sorted(d.alphabet)
    seen = {d.initial: ()}
    queue = deque([d.initial])
    while queue:
        q = queue.popleft()
        if q in d.finals:
            return seen[q]
        for a in letters:
            t = d.delta[(q, a)]
            if t not in seen:
                seen[t] = seen[q] + (a,)
                queue.append(t)
    return None


# ---------------------------------------------------------------------------
# NFA internals (regex, reversal, concatenation, projection)

class Nfa:
    """Internal nondeterministic automaton with epsilon moves."""

    def __init__(self):
        self.n = 0
        self.eps = {}
        self.trans = {}
        self.starts = set()
        self.finals = set()

    def new_state(self) -> int:
        q = self.n
        self.n += 1
        self.eps.setdefault(q, set())
        return q

    def add(self, src: int, letter, dst: int):
        self.trans.setdefault((src, letter), set()).add(dst)

    def add_eps(self, src: int, dst: int):
        self.eps.setdefault(src, set()).add(dst)

    def closure(self, states) -> frozenset:
        out = set(states)
        stack = list(states)
        while stack:
            q = stack.pop()
            for t in self.eps.get(q, ()):
                if t not in out:
                    out.add(t)
                    stack.append(t)
        return frozenset(out)


def determinize(nfa: Nfa, alphabet, cap: int = DEFAULT_STATE_CAP) -> Dfa:
    letters = sorted(alphabet)
    if not letters:
        raise InputError("empty alphabet")
    start = nfa.closure(nfa.starts)
    states = [start]
    seen = {start}
    delta = {}
    for subset in states:
        for a in letters:
            targets = set()
            for q in subset:
                targets |= nfa.trans.get((q, a), set())
            nxt = nfa.closure(targets)
            delta[(subset, a)] = nxt
            if nxt not in seen:
                seen.add(nxt)
                states.append(nxt)
                if len(states) > cap:
                    raise CapError(f"state cap exceeded ({cap}) during determinization")
    finals = [s for s in states if s & nfa.finals]
    return minimize(make_dfa(letters, states, start, finals, delta))


def reverse(d: Dfa) -> Dfa:
    """The mirror-image language."""
    nfa = Nfa()
    index = {q: nfa.new_state() for q in d.states}
    for (q, a), t in d.delta.items():
        nfa.add(index[t], a, index[q])
    nfa.starts = {index[q] for q in d.finals}
    nfa.finals = {index[d.initial]}
    return determinize(nfa, d.alphabet)


def concat_letter(d1: Dfa, letter, d2: Dfa, cap: int = DEFAULT_STATE_CAP) -> Dfa:
    """The language L(d1) . letter . L(d2)."""
    _require_same_alphabet(d1, d2)
    if letter not in set(d1.alphabet):
        raise InputError(f"letter {letter!r} outside alphabet")
    nfa = Nfa()
    left = {q: nfa.new_state() for q in d1.states}
    right = {q: nfa.new_state() for q in d2.states}
    for (q, a), t in d1.delta.items():
        nfa.add(left[q], a, left[t])
    for (q, a), t in d2.delta.items():
        nfa.add(right[q], a, right[t])
    for q in d1.finals:
        nfa.add(left[q], letter, right[d2.initial])
    nfa.starts = {left[d1.initial]}
    nfa.finals = {right[q] for q in d2.finals}
    return determinize(nfa, d1.alphabet, cap)


# ---------------------------------------------------------------------------
# Regular expression input
#
# Grammar (documented in docs/formats.md):
#   alt    := concat ('|' concat)*
#   concat := repeat*          an empty concatenation denotes the empty word
#   repeat := atom '*'*
#   atom   := letter | '(' alt ')'
# so "()" denotes the empty word. Letters are single characters other than
# the metacharacters; whitespace is ignored.

_META = set("()|*")


def regex_to_dfa(pattern: str, alphabet: Sequence[str] | None = None) -> Dfa:
    """Compile a pattern to the minimal DFA over the union of the pattern's
    letters and the optionally declared alphabet."""
    tokens = [c for c in pattern if not c.isspace()]
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def parse_alt():
        nonlocal pos
        branches = [parse_concat()]
        while peek() == "|":
            pos += 1
            branches.append(parse_concat())
        node = branches[0]
        for b in branches[1:]:
            node = ("alt", node, b)
        return node

    def parse_concat():
        nonlocal pos
        parts = []
        while peek() is not None and peek() not in ")|":
            parts.append(parse_repeat())
        if not parts:
            return ("eps",)
        node = parts[0]
        for p in parts[1:]:
            node = ("cat", node, p)
        return node

    def parse_repeat():
        nonlocal pos
        node = parse_atom()
        while peek() == "*":
            pos += 1
            node = ("star", node)
        return node

    def parse_atom():
        nonlocal pos
        c = peek()
        if c == "(":
            pos += 1
            node = parse_alt()
            if peek() != ")":
                raise InputError(f"unbalanced parenthesis in pattern at offset {pos}")
            pos += 1
            return node
        if c is None or c in _META:
            raise InputError(f"unexpected {c!r} in pattern at offset {pos}")
        pos += 1
        return ("lit", c)

    ast = parse_alt()
    if pos != len(tokens):
        raise InputError(f"trailing input in pattern at offset {pos}")

    letters = set()

    def collect(node):
        if node[0] == "lit":
            letters.add(node[1])
        elif node[0] in ("cat", "alt"):
            collect(node[1])
            collect(node[2])
        elif node[0] == "star":
            collect(node[1])

    collect(ast)
    if alphabet is not None:
        letters |= set(alphabet)
    if not letters:
        raise InputError("pattern uses no letters and no alphabet was declared")

    nfa = Nfa()

    def build(node) -> tuple[int, int]:
        if node[0] == "eps":
            s = nfa.new_state()
            f = nfa.new_state()
            nfa.add_eps(s, f)
            return s, f
        if node[0] == "lit":
            s = nfa.new_state()
            f = nfa.new_state()
            nfa.add(s, node[1], f)
            return s, f
        if node[0] == "cat":
            s1, f1 = build(node[1])
            s2, f2 = build(node[2])
            nfa.add_eps(f1, s2)
            return s1, f2
        if node[0] == "alt":
            s1, f1 = build(node[1])
            s2, f2 = build(node[2])
            s = nfa.new_state()
            f = nfa.new_state()
            nfa.add_eps(s, s1)
            nfa.add_eps(s, s2)
            nfa.add_eps(f1, f)
            nfa.add_eps(f2, f)
            return s, f
        s1, f1 = build(node[1])  # star
        s = nfa.new_state()
        f = nfa.new_state()
        nfa.add_eps(s, s1)
        nfa.add_eps(s, f)
        nfa.add_eps(f1, s1)
        nfa.add_eps(f1, f)
        return s, f

    start, final = build(ast)
    nfa.starts = {start}
    nfa.finals = {final}
    return determinize(nfa, sorted(letters))


# ---------------------------------------------------------------------------
# Position-residue decoration

def decorate_word(word: Sequence[str], n: int, offset: int = 0) -> Word:
    """Attach to each position its residue: position i (1-based) carries
    the residue of i + offset in the 1..n convention."""
    if n < 1:
        raise InputError("modulus must be at least 1")
    return tuple(
        DecoratedLetter(a, mod1(i + offset, n)).text for i, a in enumerate(word, start=1)
    )


def decorated_letters(alphabet, n: int) -> list[str]:
    return sorted(DecoratedLetter(a, i).text for a in alphabet for i in range(1, n + 1))


def _decoration_product(d: Dfa, n: int):
    """States (q, r) with r = prefix length mod n, plus a sink for words
    whose residues are inconsistent with their positions."""
    sink = "sink"
    states = [(q, r) for q in d.states for r in range(n)] + [sink]
    delta = {}
    letters = decorated_letters(d.alphabet, n)
    parsed = [DecoratedLetter.parse(x) for x in letters]
    for q in d.states:
        for r in range(n):
            for text, dl in zip(letters, parsed):
                if dl.residue == mod1(r + 1, n):
                    delta[((q, r), text)] = (d.delta[(q, dl.base)], (r + 1) % n)
                else:
                    delta[((q, r), text)] = sink
    for text in letters:
        delta[(sink, text)] = sink
    finals = [(q, r) for q in d.states for r in range(n) if q in d.finals]
    return make_dfa(letters, states, (d.initial, 0), finals, delta), sink


def decorate(d: Dfa, n: int) -> Dfa:
    """The language of decorated words of L: the image of L under the
    residue decoration starting at offset 0."""
    if n < 1:
        raise InputError("modulus must be at least 1")
    product, _ = _decoration_product(d, n)
    return minimize(product)


def length_residues(d: Dfa, n: int) -> frozenset[int]:
    """All residues (1..n convention) of lengths of words in L."""
    if n < 1:
        raise InputError("modulus must be at least 1")
    seen = {(d.initial, 0)}
    queue = deque(seen)
    out = set()
    while queue:
        q, r = queue.popleft()
        if q in d.finals:
            out.add(mod1(r, n))
        for a in d.alphabet:
            nxt = (d.delta[(q, a)], (r + 1) % n)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(out)


def decorated_alphabet(d: Dfa, n: int) -> frozenset[str]:
    """The decorated letters occurring in some decorated word of L,
    via reachable and co-reachable analysis of the decoration product."""
    if n < 1:
        raise InputError("modulus must be at least 1")
    product, sink = _decoration_product(d, n)
    reach = {product.initial}
    queue = deque(reach)
    while queue:
        q = queue.popleft()
        for a in product.alphabet:
            t = product.delta[(q, a)]
            if t not in reach:
                reach.add(t)
                queue.append(t)
    back = {}
    for (q, a), t in product.delta.items():
        back.setdefault(t, set()).add(q)
    co = set(product.finals)
    queue = deque(co)
    while queue:
        q = queue.popleft()
        for p in back.get(q, ()):
            if p not in co:
                co.add(p)
                queue.append(p)
    out = set()
    for (q, a), t in product.delta.items():
        if q in reach and t in co and t != sink and q != sink:
            out.add(a)
    return frozenset(out)
