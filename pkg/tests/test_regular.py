import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import all_words
from qautomata import catalog
from qautomata.errors import GrammarFormError
from qautomata.grammar import (
    QuantumGrammar,
    derive_amplitudes,
    f_of_word,
    is_normalized_regular,
    is_regular,
    normalize_regular,
    qfa_to_regular_grammar,
    regular_to_qfa,
)
from qautomata.qfa import embed_dfa, random_qfa

WORDS5 = list(all_words("ab", 5))


def test_normalize_shortest_chain():
    q = 0.6j
    g = QuantumGrammar.from_rules([("I", "abI", q)], "I")
    n = normalize_regular(g)
    rules = {(p.lhs, p.rhs): p.amplitudes[0] for p in n.productions}
    assert rules == {("I", ("a", "I_")): q, ("I_", ("b", "I")): 1}


def test_normalize_unchanged():
    g = QuantumGrammar.from_rules([("I", "aI", 0.5), ("I", "b", 1)], "I")
    assert normalize_regular(g) is g


def test_normalize_rejects_non_regular():
    with pytest.raises(GrammarFormError):
        normalize_regular(catalog.dyck_grammar())


@st.composite
def regular_grammars(draw):
    dim = draw(st.integers(1, 2))
    variables = ["I", "X", "Y"]
    rules = []
    for v in variables:
        for _ in range(draw(st.integers(0, 3))):
            body = "".join(draw(st.lists(st.sampled_from("ab"), min_size=1, max_size=3)))
            tail = draw(st.sampled_from(["", "I", "X", "Y"]))
            amp = [complex(draw(st.floats(-1, 1)), draw(st.floats(-1, 1))) for _ in range(dim)]
            rules.append((v, body + tail, amp))
    if draw(st.booleans()):
        rules.append(("I", "", [draw(st.floats(-1, 1)) for _ in range(dim)]))
    return QuantumGrammar.from_rules(rules, "I", terminals=("a", "b"), dim=dim, variables=variables)


@given(regular_grammars())
def test_normalize_preserves_amplitudes(g):
    n = normalize_regular(g)
    assert is_normalized_regular(n) and is_regular(n)
    for w in all_words("ab", 6):
        assert np.allclose(derive_amplitudes(n, w), derive_amplitudes(g, w), atol=1e-9)


@given(regular_grammars())
def test_regular_to_qfa(g):
    q = regular_to_qfa(normalize_regular(g))
    for w in WORDS5:
        assert q(w) == pytest.approx(f_of_word(g, w), abs=1e-9)


def test_regular_to_qfa_examples():
    g = QuantumGrammar.from_rules([("I", "aI", 1), ("I", "a", 1)], "I", terminals=("a", "b"))
    q = regular_to_qfa(g)
    for w in WORDS5:
        assert q(w) == (1.0 if w and set(w) == {"a"} else 0.0)
    c1, c2 = 0.3 + 0.1j, -0.8
    g2 = QuantumGrammar(["I"], ["a", "b"], "I", 2, [("I", ("a", "I"), [c1, c2]), ("I", ("b",), [1, 1])])
    q2 = regular_to_qfa(g2)
    for n in range(5):
        assert q2("a" * n + "b") == pytest.approx(abs(c1**n) ** 2 + abs(c2**n) ** 2)
    empty = QuantumGrammar(["I"], ["a", "b"], "I", 1, [])
    assert all(regular_to_qfa(empty)(w) == 0 for w in WORDS5)


def test_empty_word_comes_from_start_production():
    g = QuantumGrammar.from_rules([("I", "aI", 1), ("I", "a", 1), ("I", "", 0.5)], "I")
    n = normalize_regular(g)
    assert regular_to_qfa(n)("") == pytest.approx(0.25)


def test_regular_to_qfa_needs_normal_form():
    with pytest.raises(GrammarFormError):
        regular_to_qfa(QuantumGrammar.from_rules([("I", "abI", 1)], "I"))


def test_measurement_machine_grammar():
    g = qfa_to_regular_grammar(catalog.measurement_qfa())
    for w in all_words("a", 4):
        assert f_of_word(g, w) == pytest.approx(0.75)


def test_dfa_grammar_is_characteristic():
    d = catalog.bb_forbidden_dfa()
    g = qfa_to_regular_grammar(embed_dfa(d))
    for w in all_words("ab", 6):
        assert f_of_word(g, w) == (1.0 if d.accepts(w) else 0.0)


@given(st.integers(0, 2**32 - 1), st.integers(1, 2))
def test_round_trip(seed, accept_dim):
    q = random_qfa(2, ("a", "b"), np.random.default_rng(seed), accept_dim=accept_dim)
    g = qfa_to_regular_grammar(q)
    assert g.dim == accept_dim
    back = regular_to_qfa(normalize_regular(g))
    for w in WORDS5:
        assert back(w) == pytest.approx(q(w), abs=1e-9)
