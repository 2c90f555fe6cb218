"""Quantum finite automata, quantum push-down automata and quantum grammars.

Machines are immutable values; constructions return new machines. Words
are tuples of symbols, and plain strings are read one character per symbol.
"""

from .bilinear import BilinearForm, eval_bilinear, to_bilinear, to_real
from .errors import (
    AlphabetError,
    DivergenceError,
    GrammarFormError,
    InvariantError,
    ModeError,
    OracleScaleError,
    QAutomataError,
    SchemaError,
    SearchBoundError,
    ShapeError,
    UnsupportedGrammarError,
)
from .grammar import (
    Production,
    QuantumGrammar,
    derive_amplitudes,
    eliminate_epsilon,
    eliminate_left_recursion,
    eliminate_unit_productions,
    embed_unambiguous,
    f_of_word,
    grammar_forms,
    grammar_sum,
    is_chomsky,
    is_greibach,
    is_regular,
    normalize_regular,
    qfa_to_regular_grammar,
    regular_to_qfa,
    symmetric_difference,
    three_way_interference,
    to_chomsky,
    to_greibach,
)
from .io import dumps, loads, parse_machine
from .linalg import OrthonormalBasis, random_state, random_unitary
from .qfa import (
    Dfa,
    Qfa,
    accept_probability,
    complement,
    constant,
    embed_dfa,
    find_pump,
    inverse_homomorphism,
    minimize,
    monoid_is_group,
    path_sum_oracle,
    random_qfa,
    standardize_accept,
    tensor,
    verify_pump,
    weighted_direct_sum,
)
from .qpda import (
    ANY,
    Pop,
    Push,
    PushWord,
    Qpda,
    Rule,
    SparseState,
    Stay,
    as_generalized,
    build_leq_qpda,
    check_unitarity_truncated,
    chunk_word_pushes,
    expand_pop_lookahead,
    grammar_to_qpda,
    qpda_accept_probability,
    qpda_step,
    qpda_to_grammar,
    tensor_with_qfa,
    to_control_acceptance,
)
from .series import (
    TruncatedSeries,
    grammar_amplitude_series,
    hadamard_product,
    hadamard_square,
    qfa_length_coefficients,
    quantum_language_coefficients,
)

__version__ = "0.1.0"
