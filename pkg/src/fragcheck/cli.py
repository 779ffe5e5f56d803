"""Command line interface.

Exit codes: 0 success (and "definable" / "true" for verdict commands),
1 negative verdict or detected inconsistency, 2 malformed input,
3 a size cap was exceeded.  All reports are deterministic byte for byte
for a fixed command line, including the randomized cross-check battery,
which is driven entirely by its seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .automata import (
    DEFAULT_STATE_CAP,
    Dfa,
    complement,
    decorate,
    decorate_word,
    dfa_to_doc,
    dfa_to_json,
    equivalent,
    make_dfa,
    minimize,
    parse_dfa,
    regex_to_dfa,
)
from .errors import CapError, ConsistencyError, InputError
from .fologic import (
    compile_formula,
    eval_formula,
    formula_letters,
    formula_stats,
    parse_formula_document,
    to_sexp,
)
from .fragments import (
    FRAGMENTS,
    LanguageAnalysis,
    analyze,
    build_mod_witness,
    verify_vmod_implication,
)
from .hierarchy import wv_level
from .modprod import expr_to_formula, parse_expr, validate
from .monoid import (
    DEFAULT_MAX_MONOID,
    local_condition,
    me_submonoid,
    syntactic_order,
    transition_monoid,
)
from .stability import me_s, stability_info

import itertools


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fragcheck",
        description="Decide definability of regular languages in first-order "
        "fragments with and without modular predicates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def language_opts(p):
        p.add_argument("--dfa", metavar="FILE", help="JSON DFA document")
        p.add_argument("--regex", metavar="PATTERN", help="inline pattern")
        p.add_argument("--alphabet", metavar="LETTERS", help="comma separated")
        p.add_argument("--max-monoid", type=int, default=None, metavar="K")
        p.add_argument("--index-multiplier", type=int, default=1, metavar="T")
        p.add_argument("--json", action="store_true")

    p = sub.add_parser("analyze", help="full fragment report for a language")
    language_opts(p)

    p = sub.add_parser("check", help="one fragment; exit 0 iff definable")
    p.add_argument("--fragment", required=True, choices=FRAGMENTS)
    language_opts(p)

    fo = sub.add_parser("fo", help="first-order formulas")
    fo_sub = fo.add_subparsers(dest="subcommand", required=True)
    p = fo_sub.add_parser("compile", help="sentence to minimal DFA")
    p.add_argument("--formula", metavar="FILE")
    p.add_argument("--sexp", metavar="TEXT")
    p.add_argument("--alphabet", metavar="LETTERS")
    p.add_argument("--json", action="store_true")
    p = fo_sub.add_parser("eval", help="truth on one word; exit 0 iff true")
    p.add_argument("--formula", metavar="FILE")
    p.add_argument("--sexp", metavar="TEXT")
    p.add_argument("--word", required=True, metavar="WORD")

    ex = sub.add_parser("expr", help="modular product expressions")
    ex_sub = ex.add_subparsers(dest="subcommand", required=True)
    p = ex_sub.add_parser("check", help="side conditions; exit 0 iff all hold")
    p.add_argument("--expr", metavar="FILE")
    p.add_argument("--sexp", metavar="TEXT")
    p.add_argument("--alphabet", required=True, metavar="LETTERS")
    p.add_argument("--json", action="store_true")
    p = ex_sub.add_parser("to-fo", help="translate to a two-variable sentence")
    p.add_argument("--expr", metavar="FILE")
    p.add_argument("--sexp", metavar="TEXT")
    p.add_argument("--alphabet", required=True, metavar="LETTERS")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("witness", help="ordered witness for sigma2_mod")
    language_opts(p)
    p.add_argument("--max-len", type=int, default=None, metavar="L",
                   help="verify word pairs up to this length (default 2s+2)")

    p = sub.add_parser("xcheck", help="randomized cross-validation battery")
    p.add_argument("--count", type=int, default=50, metavar="N")
    p.add_argument("--max-states", type=int, default=5, metavar="S")
    p.add_argument("--max-letters", type=int, default=3, metavar="L")
    p.add_argument("--seed", type=int, default=0, metavar="SEED")
    p.add_argument("--max-monoid", type=int, default=None, metavar="K")
    p.add_argument("--json", action="store_true")

    return parser


def _resolve_cap(value: int | None) -> int:
    if value is not None:
        if value < 1:
            raise InputError("--max-monoid must be positive")
        return value
    env = os.environ.get("FRAGCHECK_MAX_MONOID")
    if env is not None:
        try:
            cap = int(env)
        except ValueError:
            raise InputError(f"FRAGCHECK_MAX_MONOID is not an integer: {env!r}") from None
        if cap < 1:
            raise InputError("FRAGCHECK_MAX_MONOID must be positive")
        return cap
    return DEFAULT_MAX_MONOID


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _split_alphabet(text: str) -> list[str]:
    letters = [a for a in text.split(",") if a]
    if not letters:
        raise InputError("empty alphabet")
    if len(set(letters)) != len(letters):
        raise InputError("duplicate letters in alphabet")
    return letters


def _load_dfa(args) -> tuple[Dfa, str]:
    if (args.dfa is None) == (args.regex is None):
        raise InputError("exactly one of --dfa and --regex is required")
    if args.dfa is not None:
        if args.alphabet is not None:
            raise InputError("the DFA document fixes its own alphabet")
        return parse_dfa(_read_file(args.dfa)), os.path.basename(args.dfa)
    alphabet = _split_alphabet(args.alphabet) if args.alphabet else None
    return regex_to_dfa(args.regex, alphabet), args.regex


def _load_formula(args):
    if (args.formula is None) == (args.sexp is None):
        raise InputError("exactly one of --formula and --sexp is required")
    text = _read_file(args.formula) if args.formula else args.sexp
    return parse_formula_document(text)


def _formula_alphabet(args, doc_alphabet, formula) -> list[str]:
    if getattr(args, "alphabet", None):
        return _split_alphabet(args.alphabet)
    if doc_alphabet:
        return doc_alphabet
    letters = sorted(formula_letters(formula))
    if not letters:
        raise InputError("no alphabet: pass --alphabet or mention letters")
    return letters


def _load_expr(args):
    if (args.expr is None) == (args.sexp is None):
        raise InputError("exactly one of --expr and --sexp is required")
    text = _read_file(args.expr) if args.expr else args.sexp
    return parse_expr(text)


def _parse_word(text: str) -> tuple:
    if not text:
        return ()
    if "," in text:
        return tuple(a for a in text.split(",") if a)
    return tuple(text)


def _multiplier(args) -> int:
    mult = getattr(args, "index_multiplier", 1)
    if mult < 1:
        raise InputError("--index-multiplier must be positive")
    return mult


def _emit(out, doc: dict):
    out.write(json.dumps(doc, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Commands

def _cmd_analyze(args, out) -> int:
    d, lid = _load_dfa(args)
    report = analyze(
        d,
        language_id=lid,
        max_monoid=_resolve_cap(args.max_monoid),
        index_multiplier=_multiplier(args),
    )
    if args.json:
        _emit(out, report.to_doc())
    else:
        out.write(report.to_text())
    return 0


def _cmd_check(args, out) -> int:
    d, _ = _load_dfa(args)
    pipeline = LanguageAnalysis(
        d,
        max_monoid=_resolve_cap(args.max_monoid),
        index_multiplier=_multiplier(args),
    )
    ok, witness = pipeline.check(args.fragment)
    if args.json:
        _emit(out, {
            "fragment": args.fragment,
            "definable": ok,
            "witness": None if witness is None else {
                "idempotent": witness[0], "element": witness[1],
            },
        })
    elif ok:
        out.write(f"{args.fragment}: definable\n")
    else:
        out.write(
            f"{args.fragment}: not definable (e={witness[0]} x={witness[1]})\n"
        )
    return 0 if ok else 1


def _cmd_fo_compile(args, out) -> int:
    doc_alphabet, formula = _load_formula(args)
    alphabet = _formula_alphabet(args, doc_alphabet, formula)
    d = compile_formula(formula, alphabet)
    if args.json:
        _emit(out, {"stats": formula_stats(formula), "dfa": dfa_to_doc(d)})
    else:
        out.write(dfa_to_json(d) + "\n")
    return 0


def _cmd_fo_eval(args, out) -> int:
    _, formula = _load_formula(args)
    value = eval_formula(formula, _parse_word(args.word))
    out.write("true\n" if value else "false\n")
    return 0 if value else 1


def _cmd_expr_check(args, out) -> int:
    expr = _load_expr(args)
    alphabet = _split_alphabet(args.alphabet)
    violations = validate(expr, alphabet)
    if args.json:
        _emit(out, {
            "valid": not violations,
            "violations": [
                {
                    "path": v.path,
                    "rule": v.rule,
                    "message": v.message,
                    "witness": v.witness,
                }
                for v in violations
            ],
        })
    elif not violations:
        out.write("ok\n")
    else:
        for v in violations:
            tail = "" if v.witness is None else f" [{v.witness}]"
            out.write(f"{v.path} {v.rule}: {v.message}{tail}\n")
    return 0 if not violations else 1


def _cmd_expr_to_fo(args, out) -> int:
    expr = _load_expr(args)
    alphabet = _split_alphabet(args.alphabet)
    formula = expr_to_formula(expr, alphabet)
    if args.json:
        _emit(out, {"formula": to_sexp(formula), "stats": formula_stats(formula)})
    else:
        out.write(to_sexp(formula) + "\n")
    return 0


def _cmd_witness(args, out) -> int:
    d, _ = _load_dfa(args)
    pipeline = LanguageAnalysis(
        d,
        max_monoid=_resolve_cap(args.max_monoid),
        index_multiplier=_multiplier(args),
    )
    ok, witness = pipeline.check("sigma2_mod")
    if not ok:
        if args.json:
            _emit(out, {
                "sigma2_mod": False,
                "witness": {"idempotent": witness[0], "element": witness[1]},
            })
        else:
            out.write(
                f"sigma2_mod: not definable (e={witness[0]} x={witness[1]})\n"
            )
        return 1
    g = build_mod_witness(pipeline.ordered, pipeline.stability)
    s = pipeline.stability.index
    size = pipeline.morphism.monoid.size
    bound = s * s * size + 2
    max_len = args.max_len if args.max_len is not None else 2 * s + 2
    holds, pair = verify_vmod_implication(pipeline.ordered, g, s, max_len)
    if args.json:
        doc = {
            "sigma2_mod": True,
            "stability_index": s,
            "monoid_size": size,
            "witness_size": g.monoid.size,
            "witness_bound": bound,
            "verified_to_length": max_len,
            "implication_holds": holds,
        }
        if pair is not None:
            doc["counterexample"] = ["".join(pair[0]), "".join(pair[1])]
        _emit(out, doc)
    else:
        out.write(f"stability index {s}\n")
        out.write(f"syntactic monoid size {size}\n")
        out.write(f"witness monoid size {g.monoid.size} (bound {bound})\n")
        if holds:
            out.write(
                f"order implication verified for word pairs up to length {max_len}\n"
            )
        else:
            out.write(
                "order implication FAILED on "
                f"u={''.join(pair[0])} v={''.join(pair[1])}\n"
            )
    return 0 if holds else 1


# ---------------------------------------------------------------------------
# Randomized cross-validation

def random_dfa(rng: np.random.Generator, max_states: int, max_letters: int) -> Dfa:
    """One random machine: uniform transition table over a uniform state
    count (2..max) and letter count (1..max), final sets uniform among the
    proper nonempty subsets, initial state fixed at 0."""
    n = int(rng.integers(2, max_states + 1))
    k = int(rng.integers(1, max_letters + 1))
    letters = [chr(ord("a") + i) for i in range(k)]
    states = [f"q{i}" for i in range(n)]
    delta = {
        (q, a): states[int(rng.integers(0, n))] for q in states for a in letters
    }
    while True:
        mask = rng.integers(0, 2, size=n).astype(bool)
        if mask.any() and not mask.all():
            break
    finals = [q for q, bit in zip(states, mask) if bit]
    return make_dfa(letters, states, "q0", finals, delta)


def generate_corpus(
    count: int,
    max_states: int,
    max_letters: int,
    seed: int,
    max_monoid: int,
) -> list[Dfa]:
    """Deterministic corpus of minimized random DFAs whose syntactic
    monoids fit under the cap; oversized draws are discarded."""
    rng = np.random.default_rng(seed)
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 100 * count + 1000:
            raise CapError("could not generate the corpus under the monoid cap")
        d = minimize(random_dfa(rng, max_states, max_letters))
        try:
            transition_monoid(d, max_monoid)
        except CapError:
            continue
        out.append(d)
    return out


_DUAL = {
    "fo_lt": "fo_lt",
    "fo2_lt": "fo2_lt",
    "sigma2_lt": "pi2_lt",
    "pi2_lt": "sigma2_lt",
    "delta2_lt": "delta2_lt",
    "fo_mod": "fo_mod",
    "fo2_mod_qda": "fo2_mod_qda",
    "sigma2_mod": "pi2_mod",
    "pi2_mod": "sigma2_mod",
    "delta2_mod": "delta2_mod",
    "fo2_mod_new": "fo2_mod_new",
}

_IMPLICATIONS = (
    ("sigma2_lt", "sigma2_mod"),
    ("pi2_lt", "pi2_mod"),
    ("fo_lt", "fo_mod"),
    ("fo2_lt", "fo2_mod_qda"),
    ("sigma2_lt", "fo_lt"),
    ("pi2_lt", "fo_lt"),
    ("fo2_mod_new", "fo_mod"),
)


def xcheck_battery(d: Dfa, max_monoid: int) -> list[str]:
    """Cross-validation invariants for one language.  Returns the names of
    the failed checks (empty when everything agrees)."""
    failures: list[str] = []
    minimal = minimize(d)

    again = minimize(minimal)
    if len(again.states) != len(minimal.states) or not equivalent(again, minimal)[0]:
        failures.append("minimize-idempotent")

    if not equivalent(complement(complement(minimal)), minimal)[0]:
        failures.append("complement-involution")

    try:
        report = analyze(minimal, max_monoid=max_monoid)
    except ConsistencyError:
        failures.append("analyze-consistency")
        return failures

    pipeline = LanguageAnalysis(minimal, max_monoid=max_monoid)
    morphism = pipeline.morphism
    mon = morphism.monoid

    rebuilt = make_dfa(
        morphism.alphabet,
        list(mon.elements()),
        mon.identity,
        morphism.accepting,
        {
            (x, a): mon.mul(x, morphism.letter_map[a])
            for x in mon.elements()
            for a in morphism.alphabet
        },
    )
    if not equivalent(minimize(rebuilt), minimal)[0]:
        failures.append("recognition-rebuild")

    co_report = analyze(complement(minimal), max_monoid=max_monoid)
    for fid in FRAGMENTS:
        if report.verdicts[fid] != co_report.verdicts[_DUAL[fid]]:
            failures.append("complement-duality")
            break

    for mult in (2, 3):
        stretched = analyze(minimal, max_monoid=max_monoid, index_multiplier=mult)
        if stretched.verdicts != report.verdicts:
            failures.append("index-invariance")
            break

    for weaker, stronger in _IMPLICATIONS:
        if report.verdicts[weaker] and not report.verdicts[stronger]:
            failures.append("fragment-implications")
            break
    if report.verdicts["fo2_lt"] != report.verdicts["delta2_lt"]:
        failures.append("two-var-alternation-collapse")

    info = pipeline.stability
    for e in mon.idempotents():
        if not me_s(morphism, info, e) <= me_submonoid(mon, e):
            failures.append("stable-subset")
            break

    if stability_info(morphism, 2).stable != info.stable:
        failures.append("stable-invariance")

    for n in (2, 3):
        decorated = decorate(minimal, n)
        ok = True
        for length in range(0, 5):
            for w in itertools.product(minimal.alphabet, repeat=length):
                if decorated.accepts(decorate_word(w, n)) != minimal.accepts(w):
                    ok = False
                if length and n > 1 and decorated.accepts(decorate_word(w, n, offset=1)):
                    ok = False
        if not ok:
            failures.append("decoration-membership")
            break

    co_morphism = syntactic_order(transition_monoid(complement(minimal), max_monoid))
    ordered = pipeline.ordered
    if co_morphism.monoid.size != mon.size or not (
        (co_morphism.monoid.leq == ordered.monoid.leq.T).all()
    ):
        failures.append("order-duality")

    s = info.index
    if report.verdicts["sigma2_mod"] and s * s * mon.size <= 400:
        g = build_mod_witness(ordered, info)
        ok, _ = local_condition(g.monoid, "leq", "Me")
        if not ok:
            failures.append("witness-local-condition")
        holds, _ = verify_vmod_implication(ordered, g, s, 2 * s + 2)
        if not holds:
            failures.append("witness-implication")

    if report.verdicts["fo2_mod_new"]:
        levels = wv_level(morphism, max_level=mon.size + 2)
        if levels.w is None or levels.v is None:
            failures.append("hierarchy-bound")

    return failures


def _cmd_xcheck(args, out) -> int:
    cap = _resolve_cap(args.max_monoid)
    if args.count < 1:
        raise InputError("--count must be positive")
    corpus = generate_corpus(args.count, args.max_states, args.max_letters, args.seed, cap)
    entries = []
    failed = 0
    for idx, d in enumerate(corpus):
        monoid_size = transition_monoid(d, cap).monoid.size
        failures = xcheck_battery(d, cap)
        if failures:
            failed += 1
        entries.append((idx, d, monoid_size, failures))
    if args.json:
        _emit(out, {
            "seed": args.seed,
            "count": args.count,
            "failed": failed,
            "instances": [
                {
                    "index": idx,
                    "states": len(d.states),
                    "letters": len(d.alphabet),
                    "monoid": monoid_size,
                    "failures": failures,
                    **({"dfa": dfa_to_doc(d)} if failures else {}),
                }
                for idx, d, monoid_size, failures in entries
            ],
        })
    else:
        for idx, d, monoid_size, failures in entries:
            status = "ok" if not failures else "FAIL " + ",".join(failures)
            out.write(
                f"instance {idx:03d} states={len(d.states)} "
                f"letters={len(d.alphabet)} monoid={monoid_size} {status}\n"
            )
            if failures:
                out.write(dfa_to_json(d) + "\n")
        out.write(f"{args.count} instances, {failed} with failures\n")
    return 1 if failed else 0


def run(args, out) -> int:
    if args.command == "analyze":
        return _cmd_analyze(args, out)
    if args.command == "check":
        return _cmd_check(args, out)
    if args.command == "fo":
        if args.subcommand == "compile":
            return _cmd_fo_compile(args, out)
        return _cmd_fo_eval(args, out)
    if args.command == "expr":
        if args.subcommand == "check":
            return _cmd_expr_check(args, out)
        return _cmd_expr_to_fo(args, out)
    if args.command == "witness":
        return _cmd_witness(args, out)
    if args.command == "xcheck":
        return _cmd_xcheck(args, out)
    raise InputError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args, sys.stdout)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
