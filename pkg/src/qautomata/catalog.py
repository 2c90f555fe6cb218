"""Reference machines and grammars used by the demos and the test-suite."""

from __future__ import annotations

import numpy as np

from .grammar import QuantumGrammar, embed_unambiguous, symmetric_difference, three_way_interference
from .linalg import OrthonormalBasis
from .qfa import Dfa, Qfa
from .qpda import build_leq_qpda

__all__ = [
    "bb_forbidden_dfa",
    "build_leq_qpda",
    "dyck_grammar",
    "equal_ab_then_c",
    "equal_bc_after_a",
    "equal_ac_around_b",
    "interference_grammar",
    "measurement_qfa",
    "mod3_dfa",
    "parity_dfa",
    "small_triple",
    "small_triple_interference",
]


def bb_forbidden_dfa() -> Dfa:
    """Words over ``{a, b}`` with no factor ``bb``; ``R`` is the rejecting sink."""
    delta = {
        ("A", "a"): "A", ("A", "b"): "B",
        ("B", "a"): "A", ("B", "b"): "R",
        ("R", "a"): "R", ("R", "b"): "R",
    }
    return Dfa(("A", "B", "R"), ("a", "b"), delta, "A", frozenset({"A", "B"}))


def parity_dfa() -> Dfa:
    """Even number of ``a``'s."""
    delta = {("E", "a"): "O", ("O", "a"): "E", ("E", "b"): "E", ("O", "b"): "O"}
    return Dfa(("E", "O"), ("a", "b"), delta, "E", frozenset({"E"}))


def mod3_dfa() -> Dfa:
    """Number of ``a``'s divisible by three."""
    delta = {}
    for i in range(3):
        delta[(f"r{i}", "a")] = f"r{(i + 1) % 3}"
        delta[(f"r{i}", "b")] = f"r{i}"
    return Dfa(("r0", "r1", "r2"), ("a", "b"), delta, "r0", frozenset({"r0"}))


def measurement_qfa(accept: int = 0) -> Qfa:
    """Two-level state ``(sqrt(3)/2, -i/2)`` measured in the standard basis.

    The single input symbol acts as the identity, so ``f`` is constant:
    3/4 for ``accept=0`` and 1/4 for ``accept=1``.
    """
    s = np.array([np.sqrt(3) / 2, -0.5j])
    return Qfa(("a",), s, {"a": np.eye(2)}, OrthonormalBasis.standard([accept], 2))


def dyck_grammar() -> QuantumGrammar:
    """``I -> a I b I | ε`` with amplitude 1."""
    return embed_unambiguous([("I", "aIbI"), ("I", "")], "I", terminals=("a", "b"))


def equal_ab_then_c() -> QuantumGrammar:
    """``{a^i b^i c^j}``."""
    rules = [("S", "XC"), ("X", "aXb"), ("X", ""), ("C", "cC"), ("C", "")]
    return embed_unambiguous(rules, "S", terminals=("a", "b", "c"))


def equal_bc_after_a() -> QuantumGrammar:
    """``{a^i b^j c^j}``."""
    rules = [("S", "AY"), ("A", "aA"), ("A", ""), ("Y", "bYc"), ("Y", "")]
    return embed_unambiguous(rules, "S", terminals=("a", "b", "c"))


def equal_ac_around_b() -> QuantumGrammar:
    """``{a^i b^j c^i}``."""
    rules = [("S", "aSc"), ("S", "B"), ("B", "bB"), ("B", "")]
    return embed_unambiguous(rules, "S", terminals=("a", "b", "c"))


def interference_grammar() -> QuantumGrammar:
    """``f = 1`` on ``a^i b^j c^k`` with exactly one of ``i = j``, ``j = k``."""
    return symmetric_difference(equal_ab_then_c(), equal_bc_after_a())


def small_triple() -> tuple:
    """Three finite languages over ``{a, b}`` covering 0, 1, 2 and 3 memberships.

    ``L1 = {a, ab, ba}``, ``L2 = {ab, b, ba}``, ``L3 = {ba, bb}``.
    """
    langs = (["a", "ab", "ba"], ["ab", "b", "ba"], ["ba", "bb"])
    return tuple(
        embed_unambiguous([("S", w) for w in words], "S", terminals=("a", "b")) for words in langs
    )


def small_triple_interference() -> QuantumGrammar:
    return three_way_interference(*small_triple())
