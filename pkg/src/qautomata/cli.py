"""Command-line front end: ``qautomata <command> ...``.

Exit status is 0 on success, 1 on a library error (one-line diagnostic on
stderr) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import math
import sys

import numpy as np

from . import catalog
from .bilinear import BilinearForm, eval_bilinear, to_bilinear, to_real
from .errors import QAutomataError
from .grammar import (
    QuantumGrammar,
    check_termination,
    eliminate_epsilon,
    eliminate_unit_productions,
    f_of_word,
    grammar_forms,
    grammar_sum,
    normalize_regular,
    qfa_to_regular_grammar,
    regular_to_qfa,
    symmetric_difference,
    three_way_interference,
    to_chomsky,
    to_greibach,
)
from .io import dumps, parse_machine
from .linalg import DEFAULT_TOL, is_unitary
from .qfa import (
    Dfa,
    Qfa,
    complement,
    embed_dfa,
    find_pump,
    inverse_homomorphism,
    minimize,
    monoid_is_group,
    reachable_states,
    tensor,
    verify_pump,
    weighted_direct_sum,
)
from .qpda import (
    Qpda,
    as_generalized,
    check_unitarity_truncated,
    expand_pop_lookahead,
    grammar_to_qpda,
    qpda_accept_probability,
    qpda_to_grammar,
    tensor_with_qfa,
)
from .series import (
    grammar_amplitude_series,
    qfa_length_coefficients,
    quantum_language_coefficients,
)
from .words import as_word, words_up_to


class UsageError(Exception):
    """Bad combination of arguments; reported with exit status 2."""


# -- helpers -------------------------------------------------------------------

def _as_qfa(obj) -> Qfa:
    if isinstance(obj, Dfa):
        return embed_dfa(obj)
    if isinstance(obj, Qfa):
        return obj
    raise UsageError(f"expected a qfa or dfa file, got a {_kind(obj)}")


def _kind(obj) -> str:
    return {Qfa: "qfa", Dfa: "dfa", QuantumGrammar: "grammar", Qpda: "qpda", BilinearForm: "bilinear"}[type(obj)]


def evaluator(obj):
    """``(f, alphabet)`` for any parsed artifact."""
    if isinstance(obj, (Qfa, Dfa)):
        q = _as_qfa(obj)
        return q.__call__, q.alphabet
    if isinstance(obj, QuantumGrammar):
        return (lambda w: f_of_word(obj, w)), obj.terminals
    if isinstance(obj, Qpda):
        return (lambda w: qpda_accept_probability(obj, w)), obj.input_alphabet
    if isinstance(obj, BilinearForm):
        return (lambda w: eval_bilinear(obj, w)), obj.alphabet
    raise UsageError("unsupported artifact")


def _fmt_value(c, digits: int = 12) -> str:
    c = complex(c)
    if abs(c.imag) <= 1e-12 * max(1.0, abs(c.real)):
        return f"{c.real:.{digits}g}"
    return f"{c.real:.{digits}g}{c.imag:+.{digits}g}j"


# -- commands ----------------------------------------------------------------

def cmd_prob(args, out) -> None:
    obj = parse_machine(args.file)
    f, _ = evaluator(obj)
    print(f"{f(as_word(args.word, args.sep)):.12f}", file=out)


def cmd_coeffs(args, out) -> None:
    obj = parse_machine(args.file)
    method = args.method
    if method is None:
        method = {"qfa": "bilinear", "dfa": "bilinear", "bilinear": "bilinear", "grammar": "fixpoint", "qpda": "enumerate"}[_kind(obj)]
    n = args.max_len
    if method == "bilinear":
        if isinstance(obj, BilinearForm):
            total = sum(obj.matrices.values())
            v = np.array(obj.pi)
            values = []
            for _ in range(n + 1):
                values.append(v @ obj.eta)
                v = v @ total
            rows = [[c] for c in values]
        else:
            rows = [[c] for c in qfa_length_coefficients(_as_qfa(obj), n).coeffs]
    elif method == "fixpoint":
        if not isinstance(obj, QuantumGrammar):
            raise UsageError("--method fixpoint needs a grammar file")
        cols = [grammar_amplitude_series(obj, k, n).coeffs for k in range(obj.dim)]
        rows = [list(r) for r in zip(*cols)]
    elif method == "enumerate":
        f, alphabet = evaluator(obj)
        rows = [[c] for c in quantum_language_coefficients(f, alphabet, n).coeffs]
    else:
        raise UsageError(f"unknown method {method!r}")
    for i, row in enumerate(rows):
        print("\t".join([str(i)] + [_fmt_value(c) for c in row]), file=out)


def cmd_pump(args, out) -> None:
    q = _as_qfa(parse_machine(args.file))
    if q.generalized and all(is_unitary(m) for m in q.transitions.values()):
        # permutation DFAs embed with unitary letters
        q = dataclasses.replace(q, generalized=False)
    w = as_word(args.word, args.sep)
    k = find_pump(q, w, args.eps)
    samples = list(itertools.product(list(words_up_to(q.alphabet, 2)), repeat=2))
    ok = verify_pump(q, w, k, args.eps, samples)
    print(f"k = {k}", file=out)
    print(f"verify: {'pass' if ok else 'FAIL'} on {len(samples)} (u, v) pairs with eps = {args.eps:g}", file=out)


def convert(obj, target: str, real: bool = False):
    kind = _kind(obj)
    if target == "gnf":
        if kind != "grammar":
            raise UsageError("--to gnf needs a grammar")
        return to_greibach(obj)
    if target == "chomsky":
        if kind != "grammar":
            raise UsageError("--to chomsky needs a grammar")
        return to_chomsky(eliminate_unit_productions(eliminate_epsilon(obj)))
    if target == "qpda":
        if kind != "grammar":
            raise UsageError("--to qpda needs a grammar")
        return grammar_to_qpda(to_greibach(obj))
    if target == "grammar":
        if kind == "grammar":
            return obj
        if kind in ("qfa", "dfa"):
            return qfa_to_regular_grammar(_as_qfa(obj))
        if kind == "qpda":
            p = obj
            if p.has_below_rules():
                p = expand_pop_lookahead(as_generalized(p))
            return qpda_to_grammar(p)
        raise UsageError(f"cannot convert a {kind} to a grammar")
    if target == "qfa":
        if kind in ("qfa", "dfa"):
            return _as_qfa(obj)
        if kind == "grammar":
            return regular_to_qfa(normalize_regular(obj))
        raise UsageError(f"cannot convert a {kind} to a qfa")
    if target == "bilinear":
        if kind == "bilinear":
            return to_real(obj) if real and obj.kind == "complex" else obj
        b = to_bilinear(_as_qfa(obj))
        return to_real(b) if real else b
    raise UsageError(f"unknown target {target!r}")


def cmd_convert(args, out) -> None:
    print(dumps(convert(parse_machine(args.file), args.to, args.real)), file=out)


def cmd_check(args, out) -> None:
    obj = parse_machine(args.file)
    kind = _kind(obj)
    if kind == "qfa":
        q = obj
        print(f"qfa: dimension {q.dim}, alphabet {' '.join(q.alphabet)}, generalized={str(q.generalized).lower()}", file=out)
        print(f"|s_init|^2 = {np.vdot(q.s_init, q.s_init).real:.12g}", file=out)
        for a in q.alphabet:
            print(f"U_{a}: {'unitary' if is_unitary(q.transitions[a]) else 'not unitary'}", file=out)
        print(f"accept basis: {len(q.accept_basis)} orthonormal vectors (tolerance {DEFAULT_TOL:g})", file=out)
    elif kind == "dfa":
        m = minimize(obj)
        print(f"dfa: {len(obj.states)} states, {len(reachable_states(obj))} reachable, {len(m.states)} after minimization", file=out)
        print(f"transition monoid is a group: {str(monoid_is_group(obj)).lower()}", file=out)
    elif kind == "grammar":
        print(f"grammar: {len(obj.variables)} variables, {len(obj.productions)} productions, dimension {obj.dim}", file=out)
        print("forms: " + " ".join(sorted(grammar_forms(obj))), file=out)
        try:
            check_termination(obj)
            print("termination: ok", file=out)
        except QAutomataError as exc:
            print(f"termination: violated ({exc})", file=out)
    elif kind == "qpda":
        print(f"qpda: {len(obj.controls)} controls, {len(obj.stack_alphabet)} stack symbols, {len(obj.rules)} rules", file=out)
        print(f"acceptance: {obj.acceptance_mode}, unitary_claimed={str(obj.unitary_claimed).lower()}", file=out)
        print(str(check_unitarity_truncated(obj, args.depth)), file=out)
    else:
        print(f"bilinear ({obj.kind}): dimension {obj.dim}, alphabet {' '.join(obj.alphabet)}", file=out)


def _parse_map(text: str) -> dict:
    out = {}
    for part in text.split(","):
        if "=" not in part:
            raise UsageError(f"bad --map entry {part!r}; expected symbol=word")
        a, img = part.split("=", 1)
        out[a.strip()] = img.strip()
    return out


def cmd_closure(args, out) -> None:
    objs = [parse_machine(f) for f in args.files]
    kinds = [_kind(o) for o in objs]
    op = args.op

    def need(n):
        if len(objs) != n:
            raise UsageError(f"--op {op} takes {n} file(s)")

    if op == "sum":
        need(2)
        if kinds == ["grammar", "grammar"]:
            result = grammar_sum(*objs)
        else:
            a, b = args.weights if args.weights else (1 / math.sqrt(2), 1 / math.sqrt(2))
            result = weighted_direct_sum(_as_qfa(objs[0]), _as_qfa(objs[1]), a, b)
    elif op == "tensor":
        need(2)
        if kinds[0] == "qpda":
            result = tensor_with_qfa(objs[0], _as_qfa(objs[1]))
        else:
            result = tensor(_as_qfa(objs[0]), _as_qfa(objs[1]))
    elif op == "complement":
        need(1)
        result = complement(_as_qfa(objs[0]))
    elif op == "invhom":
        need(1)
        if not args.map:
            raise UsageError("--op invhom needs --map, e.g. --map a=ab,b=b")
        result = inverse_homomorphism(_as_qfa(objs[0]), _parse_map(args.map))
    elif op == "symdiff":
        need(2)
        result = symmetric_difference(*objs)
    elif op == "threeway":
        need(3)
        result = three_way_interference(*objs)
    else:
        raise UsageError(f"unknown op {op!r}")
    print(dumps(result), file=out)


# -- demos ---------------------------------------------------------------------

def _ints(values) -> str:
    return " ".join(str(int(round(complex(v).real))) for v in values)


def demo_fibonacci() -> str:
    s = qfa_length_coefficients(embed_dfa(catalog.bb_forbidden_dfa()), 5)
    return _ints(s.real())


def demo_measurement() -> str:
    return " ".join(f"{catalog.measurement_qfa(k)(''):.2f}" for k in (0, 1))


def demo_dyck() -> str:
    s = grammar_amplitude_series(catalog.dyck_grammar(), 0, 8)
    return _ints(s.real()[::2])


def demo_leq() -> str:
    p = catalog.build_leq_qpda()
    s = quantum_language_coefficients(p, p.input_alphabet, 8)
    return _ints(s.real()[::2])


def demo_symdiff() -> str:
    g = catalog.interference_grammar()
    return "\n".join(f"{w}\t{f_of_word(g, w):.0f}" for w in ("aabbc", "aabbcc", "abc", "abcc"))


DEMOS = {
    "fibonacci": demo_fibonacci,
    "measurement": demo_measurement,
    "dyck": demo_dyck,
    "leq": demo_leq,
    "symdiff": demo_symdiff,
}

DEMO_GOLDEN = {
    "fibonacci": "1 2 3 5 8 13",
    "measurement": "0.75 0.25",
    "dyck": "1 1 2 5 14",
    "leq": "1 2 6 20 70",
    "symdiff": "aabbc\t1\naabbcc\t0\nabc\t0\nabcc\t1",
}


def cmd_demo(args, out) -> None:
    print(DEMOS[args.name](), file=out)


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qautomata", description="Quantum automata and quantum grammars.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prob", help="acceptance probability f(word)")
    p.add_argument("file")
    p.add_argument("word", nargs="?", default="")
    p.add_argument("--sep", default=None, help="symbol separator for multi-character alphabets")
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("coeffs", help="length-coefficient series")
    p.add_argument("file")
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--method", choices=["bilinear", "enumerate", "fixpoint"])
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("pump", help="pumping constant of a unitary QFA")
    p.add_argument("file")
    p.add_argument("--word", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--sep", default=None)
    p.set_defaults(func=cmd_pump)

    p = sub.add_parser("convert", help="convert between representations")
    p.add_argument("file")
    p.add_argument("--to", required=True, choices=["gnf", "chomsky", "qpda", "grammar", "bilinear", "qfa"])
    p.add_argument("--real", action="store_true", help="real 2n^2 form for --to bilinear")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("check", help="structural and unitarity reports")
    p.add_argument("file")
    p.add_argument("--depth", type=int, default=6)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("closure", help="combine machines or grammars")
    p.add_argument("--op", required=True, choices=["sum", "tensor", "complement", "invhom", "symdiff", "threeway"])
    p.add_argument("files", nargs="+")
    p.add_argument("--weights", type=complex, nargs=2, metavar=("A", "B"))
    p.add_argument("--map", help="homomorphism for invhom, e.g. a=ab,b=b")
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("demo", help="print golden values of a reference example")
    p.add_argument("name", choices=sorted(DEMOS))
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out)
    except UsageError as exc:
        print(f"qautomata: usage error: {exc}", file=err)
        return 2
    except (QAutomataError, ValueError, KeyError, IndexError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"qautomata: error: {msg}", file=err)
        return 1
    return 0


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
