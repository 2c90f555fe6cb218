"""The fourteen acceptance criteria, each at its stated tolerance.

``conftest.py`` prints one PASS/FAIL line per criterion after the run.
"""

import cmath
import itertools
import math
import time

import numpy as np

from oracles import abc_indices, all_words, balanced, equal_counts, path_sum
from qautomata import (
    Qfa,
    OrthonormalBasis,
    accept_probability,
    complement,
    embed_dfa,
    eval_bilinear,
    f_of_word,
    find_pump,
    grammar_amplitude_series,
    grammar_to_qpda,
    inverse_homomorphism,
    is_greibach,
    monoid_is_group,
    normalize_regular,
    qfa_length_coefficients,
    qfa_to_regular_grammar,
    qpda_step,
    qpda_to_grammar,
    quantum_language_coefficients,
    random_qfa,
    regular_to_qfa,
    tensor,
    to_bilinear,
    to_greibach,
    to_real,
    verify_pump,
    weighted_direct_sum,
    check_unitarity_truncated,
    QuantumGrammar,
    as_generalized,
    expand_pop_lookahead,
)
from qautomata import catalog
from qautomata.qfa import apply_homomorphism

CRITERIA = [
    (1, "test_fibonacci_golden", "Fibonacci length coefficients of the bb-forbidden DFA"),
    (2, "test_measurement_example", "measurement example gives 3/4 and 1/4"),
    (3, "test_catalan_golden", "Catalan coefficients of the Dyck grammar"),
    (4, "test_central_binomial_golden", "central binomial coefficients of the equal-count QPDA"),
    (5, "test_closure_laws", "closure laws on 100 random unitary QFAs"),
    (6, "test_path_sum_equivalence", "path-sum oracle equivalence"),
    (7, "test_pumping", "pumping constants verified, rational phases exact"),
    (8, "test_group_monoid", "group-monoid test on bb-forbidden, parity, mod-3"),
    (9, "test_bilinear_pipeline", "complex and real bilinear forms"),
    (10, "test_greibach_pipeline", "Greibach normal form pipeline"),
    (11, "test_grammar_qpda_equivalence", "grammar <-> QPDA compilations and round trip"),
    (12, "test_regular_qfa_equivalence", "regular grammar <-> QFA equivalence"),
    (13, "test_interference", "symmetric-difference and three-way interference"),
    (14, "test_unitarity_conservation", "norm conservation and truncated unitarity of the equal-count QPDA"),
]


def test_fibonacci_golden():
    t0 = time.perf_counter()
    s = qfa_length_coefficients(embed_dfa(catalog.bb_forbidden_dfa()), 12)
    elapsed = time.perf_counter() - t0
    expected = [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377]
    assert np.allclose(s.coeffs, expected, atol=1e-6, rtol=0)
    assert elapsed < 1.0


def test_measurement_example():
    assert abs(catalog.measurement_qfa(0)("") - 0.75) <= 1e-12
    assert abs(catalog.measurement_qfa(1)("") - 0.25) <= 1e-12


def test_catalan_golden():
    t0 = time.perf_counter()
    s = grammar_amplitude_series(catalog.dyck_grammar(), 0, 12)
    elapsed = time.perf_counter() - t0
    assert np.allclose(s.coeffs[::2], [1, 1, 2, 5, 14, 42, 132], atol=1e-6, rtol=0)
    assert np.allclose(s.coeffs[1::2], 0, atol=1e-6)
    assert elapsed < 1.0


def test_central_binomial_golden():
    p = catalog.build_leq_qpda()
    t0 = time.perf_counter()
    s = quantum_language_coefficients(p, p.input_alphabet, 10)
    elapsed = time.perf_counter() - t0
    assert np.allclose(s.coeffs[::2], [1, 2, 6, 20, 70, 252], atol=1e-6, rtol=0)
    assert elapsed < 30.0


def _random_word(rng, alphabet, max_len=6):
    n = int(rng.integers(0, max_len + 1))
    return "".join(rng.choice(list(alphabet), size=n))


def test_closure_laws():
    rng = np.random.default_rng(1)
    alphabet = ("a", "b")
    h = {"a": "ab", "b": "b", "c": ""}
    for _ in range(100):
        q = random_qfa(int(rng.integers(1, 5)), alphabet, rng)
        r = random_qfa(int(rng.integers(1, 5)), alphabet, rng)
        theta = rng.uniform(0, math.pi / 2)
        a, b = math.cos(theta) * cmath.exp(1j * rng.uniform(0, 6.3)), math.sin(theta)
        ds = weighted_direct_sum(q, r, a, b)
        tp = tensor(q, r)
        cq = complement(q)
        hq = inverse_homomorphism(q, h)
        for _ in range(20):
            w = _random_word(rng, alphabet)
            fq, fr = q(w), r(w)
            assert abs(ds(w) - (abs(a) ** 2 * fq + abs(b) ** 2 * fr)) <= 1e-9
            assert abs(tp(w) - fq * fr) <= 1e-9
            assert abs(cq(w) + fq - 1) <= 1e-9
            u = _random_word(rng, ("a", "b", "c"))
            assert abs(hq(u) - q(apply_homomorphism(h, u))) <= 1e-9


def test_path_sum_equivalence():
    rng = np.random.default_rng(2)
    for _ in range(50):
        q = random_qfa(int(rng.integers(1, 4)), ("a", "b"), rng)
        w = _random_word(rng, ("a", "b"), 5)
        oracle = path_sum(q.s_init, q.transitions, q.accept_basis.vectors, w)
        assert abs(accept_probability(q, w) - oracle) <= 1e-9


def _phase_machine(phases):
    n = len(phases)
    u = np.diag([cmath.exp(1j * p) for p in phases])
    s = np.ones(n) / math.sqrt(n)
    return Qfa(("a",), s, {"a": u}, OrthonormalBasis.standard([0], n))


def test_pumping():
    rng = np.random.default_rng(3)
    for eps in (0.5, 0.05):
        for _ in range(20):
            q = random_qfa(int(rng.integers(1, 3)), ("a", "b"), rng)
            w = _random_word(rng, ("a", "b"), 3) or "a"
            k = find_pump(q, w, eps)
            samples = [(_random_word(rng, ("a", "b"), 4), _random_word(rng, ("a", "b"), 4)) for _ in range(20)]
            assert verify_pump(q, w, k, eps, samples)
    assert find_pump(_phase_machine([2 * math.pi * 3 / 10]), "a", 1e-6) == 10
    assert find_pump(_phase_machine([2 * math.pi / 7, 2 * math.pi / 3]), "a", 1e-6) == 21


def test_group_monoid():
    assert monoid_is_group(catalog.bb_forbidden_dfa()) is False
    assert monoid_is_group(catalog.parity_dfa()) is True
    assert monoid_is_group(catalog.mod3_dfa()) is True


def test_bilinear_pipeline():
    rng = np.random.default_rng(4)
    for _ in range(50):
        q = random_qfa(int(rng.integers(1, 4)), ("a", "b"), rng)
        w = _random_word(rng, ("a", "b"), 6)
        b = to_bilinear(q)
        r = to_real(b)
        assert b.dim == q.dim ** 2 and r.dim == 2 * q.dim ** 2
        f = accept_probability(q, w)
        assert abs(eval_bilinear(b, w) - f) <= 1e-9
        assert abs(eval_bilinear(r, w) - f) <= 1e-9


def _word_sets():
    return {
        "dyck": (catalog.dyck_grammar(), list(all_words("ab", 8))),
        "interference": (catalog.interference_grammar(), list(all_words("abc", 6))),
    }


def test_greibach_pipeline():
    for g, words in _word_sets().values():
        gnf = to_greibach(g)
        assert is_greibach(gnf)
        for w in words:
            assert abs(f_of_word(gnf, w) - f_of_word(g, w)) <= 1e-9


def test_grammar_qpda_equivalence():
    t0 = time.perf_counter()
    for g, words in _word_sets().values():
        gnf = to_greibach(g)
        machine = grammar_to_qpda(gnf)
        back = qpda_to_grammar(machine)
        for w in words:
            f = f_of_word(g, w)
            assert abs(machine(w) - f) <= 1e-9
            assert abs(f_of_word(back, w) - f) <= 1e-9
    leq = catalog.build_leq_qpda()
    leq_grammar = qpda_to_grammar(expand_pop_lookahead(as_generalized(leq)))
    for w in all_words("ab", 8):
        assert abs(f_of_word(leq_grammar, w) - leq(w)) <= 1e-9
    assert time.perf_counter() - t0 < 60.0


def _random_regular_grammar(rng, dim):
    variables = ["I", "X", "Y"]
    rules = []
    for v in variables:
        for _ in range(3):
            body = "".join(rng.choice(["a", "b"], size=int(rng.integers(1, 3))))
            if rng.random() < 0.6:
                body += str(rng.choice(variables))
            amp = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            rules.append((v, body, 0.4 * amp))
    rules.append(("I", "", rng.normal(size=dim)))
    return QuantumGrammar.from_rules(rules, "I", terminals=("a", "b"), dim=dim)


def test_regular_qfa_equivalence():
    rng = np.random.default_rng(5)
    words = list(all_words("ab", 5))
    for _ in range(10):
        q = random_qfa(2, ("a", "b"), rng)
        g = qfa_to_regular_grammar(q)
        back = regular_to_qfa(normalize_regular(g))
        for w in words:
            assert abs(f_of_word(g, w) - q(w)) <= 1e-9
            assert abs(back(w) - q(w)) <= 1e-9
    for dim in (1, 2, 2):
        g = _random_regular_grammar(rng, dim)
        q = regular_to_qfa(normalize_regular(g))
        g2 = qfa_to_regular_grammar(q)
        for w in words:
            f = f_of_word(g, w)
            assert abs(q(w) - f) <= 1e-9 * max(1.0, f)
            assert abs(f_of_word(g2, w) - f) <= 1e-9 * max(1.0, f)


def test_interference():
    g = catalog.interference_grammar()
    for n in range(10):
        for i, j in itertools.product(range(n + 1), repeat=2):
            k = n - i - j
            if k < 0:
                continue
            expected = 1.0 if (i == j) != (j == k) else 0.0
            assert abs(f_of_word(g, "a" * i + "b" * j + "c" * k) - expected) <= 1e-9
    three = catalog.small_triple_interference()
    langs = [{"a", "ab", "ba"}, {"ab", "b", "ba"}, {"ba", "bb"}]
    seen = set()
    for w in all_words("ab", 3):
        count = sum(w in lang for lang in langs)
        seen.add(count)
        expected = 1.0 if count in (1, 2) else 0.0
        assert abs(f_of_word(three, w) - expected) <= 1e-9
    assert seen == {0, 1, 2, 3}


def test_unitarity_conservation():
    p = catalog.build_leq_qpda()
    for w in all_words("ab", 10):
        s = p.initial_state()
        for ch in w:
            s = qpda_step(p, s, ch)
            assert abs(s.norm2() - 1) <= 1e-12
    assert check_unitarity_truncated(p, 6).interior_unitary
