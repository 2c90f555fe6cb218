"""Length generating functions of quantum languages.

Only the commutative restriction is computed: every symbol is replaced by
the single variable ``z`` and series are truncated at a cutoff degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bilinear import to_bilinear
from .errors import InvariantError, OracleScaleError, ShapeError, UnsupportedGrammarError
from .qfa import Qfa
from .words import words_of_length

ENUMERATION_LIMIT = 10**7


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Coefficients of degrees ``0..cutoff``, stored as complex numbers."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size == 0:
            raise ShapeError("a truncated series needs a non-empty 1-d coefficient array")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def cutoff(self) -> int:
        return self.coeffs.shape[0] - 1

    def __len__(self):
        return self.coeffs.shape[0]

    def __getitem__(self, n):
        return self.coeffs[n]

    def real(self, tol: float = 1e-9) -> np.ndarray:
        """Real coefficients; raises if any imaginary part exceeds ``tol``."""
        if np.any(np.abs(self.coeffs.imag) > tol):
            raise InvariantError("series has non-real coefficients")
        return self.coeffs.real.copy()

    def conj(self) -> TruncatedSeries:
        return TruncatedSeries(self.coeffs.conj())

    @classmethod
    def ones(cls, cutoff: int) -> TruncatedSeries:
        return cls(np.ones(cutoff + 1))


def hadamard_product(s: TruncatedSeries, t: TruncatedSeries) -> TruncatedSeries:
    if s.cutoff != t.cutoff:
        raise ShapeError(f"cutoff mismatch: {s.cutoff} vs {t.cutoff}")
    return TruncatedSeries(s.coeffs * t.coeffs)


def hadamard_square(s: TruncatedSeries) -> TruncatedSeries:
    """``conj(s) . s``: coefficientwise squared modulus."""
    return hadamard_product(s.conj(), s)


def qfa_length_coefficients(q: Qfa, n_max: int) -> TruncatedSeries:
    """Degree ``n`` coefficient is ``sum_{|w|=n} f(w)``.

    Computed as ``pi (sum_a M_a)^n eta`` on the bilinear lift, so the cost is
    linear in ``n_max`` and independent of the number of words.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    b = to_bilinear(q)
    total = sum(b.matrices.values())
    v = np.array(b.pi)
    out = np.empty(n_max + 1, dtype=complex)
    for n in range(n_max + 1):
        out[n] = v @ b.eta
        v = v @ total
    return TruncatedSeries(out)


def quantum_language_coefficients(
    f_eval: Callable, alphabet: Sequence[str], n_max: int
) -> TruncatedSeries:
    """Degree ``n`` coefficient is ``sum_{|w|=n} f_eval(w)`` by explicit enumeration."""
    k = len(alphabet)
    if k ** n_max > ENUMERATION_LIMIT:
        raise OracleScaleError(f"{k}^{n_max} words exceed the enumeration limit")
    out = np.zeros(n_max + 1, dtype=complex)
    for n in range(n_max + 1):
        out[n] = sum(f_eval(w) for w in words_of_length(tuple(alphabet), n))
    return TruncatedSeries(out)


def _truncated_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.convolve(x, y)[: x.shape[0]]


def grammar_amplitude_series(g, k: int, n_max: int) -> TruncatedSeries:
    """Amplitude series ``g_I`` of coordinate ``k``, every terminal set to ``z``.

    Solves ``g_v = sum_{v -> beta} c_k(v -> beta) g_beta`` by synchronous
    fixed-point iteration from zero. The iteration is exact once the
    truncated iterate repeats.
    """
    if not 0 <= k < g.dim:
        raise IndexError(f"amplitude coordinate {k} out of range for dimension {g.dim}")
    size = n_max + 1
    z = np.zeros(size, dtype=complex)
    if size > 1:
        z[1] = 1
    one = np.zeros(size, dtype=complex)
    one[0] = 1
    variables = set(g.variables)
    current = {v: np.zeros(size, dtype=complex) for v in g.variables}
    max_rounds = 2 * size + len(g.variables)
    for _ in range(max_rounds):
        nxt = {v: np.zeros(size, dtype=complex) for v in g.variables}
        for p in g.productions:
            c = p.amplitudes[k]
            if c == 0:
                continue
            term = one
            for sym in p.rhs:
                term = _truncated_mul(term, current[sym] if sym in variables else z)
            nxt[p.lhs] = nxt[p.lhs] + c * term
        if all(np.array_equal(nxt[v], current[v]) for v in g.variables):
            return TruncatedSeries(current[g.initial])
        current = nxt
    raise UnsupportedGrammarError(f"fixed point not reached within {max_rounds} rounds")
