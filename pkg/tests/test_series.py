import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import all_words
from qautomata import catalog
from qautomata.errors import OracleScaleError, ShapeError, UnsupportedGrammarError
from qautomata.grammar import QuantumGrammar
from qautomata.qfa import embed_dfa, random_qfa
from qautomata.series import (
    TruncatedSeries,
    grammar_amplitude_series,
    hadamard_product,
    hadamard_square,
    qfa_length_coefficients,
    quantum_language_coefficients,
)


def test_fibonacci():
    s = qfa_length_coefficients(embed_dfa(catalog.bb_forbidden_dfa()), 12)
    assert np.allclose(s.real(), [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377])


@given(st.integers(0, 2**32 - 1))
def test_bilinear_coefficients_match_enumeration(seed):
    q = random_qfa(2, ("a", "b"), np.random.default_rng(seed))
    fast = qfa_length_coefficients(q, 5)
    slow = quantum_language_coefficients(q, q.alphabet, 5)
    assert np.allclose(fast.coeffs, slow.coeffs, atol=1e-9)


def test_measurement_series_is_three_quarters_times_ones():
    s = qfa_length_coefficients(catalog.measurement_qfa(), 6)
    assert np.allclose(s.real(), 0.75)


def test_hadamard():
    s = TruncatedSeries([1, 1j, 2])
    t = TruncatedSeries([3, 2, 1])
    assert np.allclose(hadamard_product(s, t).coeffs, [3, 2j, 2])
    assert np.allclose(hadamard_square(s).coeffs, [1, 1, 4])
    with pytest.raises(ShapeError):
        hadamard_product(s, TruncatedSeries([1, 2]))


def test_real_rejects_imaginary_coefficients():
    with pytest.raises(ValueError):
        TruncatedSeries([1j]).real()


def test_catalan():
    s = grammar_amplitude_series(catalog.dyck_grammar(), 0, 12)
    assert np.allclose(s.coeffs[::2], [1, 1, 2, 5, 14, 42, 132])


def test_series_matches_summed_amplitudes():
    from qautomata.grammar import derive_amplitudes

    g = catalog.interference_grammar()
    s = grammar_amplitude_series(g, 0, 6)
    sums = np.zeros(7, dtype=complex)
    for w in all_words("abc", 6):
        sums[len(w)] += derive_amplitudes(g, w)[0]
    assert np.allclose(s.coeffs, sums)


def test_equal_count_central_binomials():
    p = catalog.build_leq_qpda()
    s = quantum_language_coefficients(p, p.input_alphabet, 8)
    assert np.allclose(s.real(), [1, 0, 2, 0, 6, 0, 20, 0, 70])


def test_enumeration_guard():
    with pytest.raises(OracleScaleError):
        quantum_language_coefficients(lambda w: 0.0, "abcd", 40)


def test_unit_cycle_series_does_not_converge():
    g = QuantumGrammar.from_rules([("I", "I", 0.5), ("I", "a", 1)], "I")
    with pytest.raises(UnsupportedGrammarError):
        grammar_amplitude_series(g, 0, 3)


def test_coordinate_out_of_range():
    with pytest.raises(IndexError):
        grammar_amplitude_series(catalog.dyck_grammar(), 1, 3)
