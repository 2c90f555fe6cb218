"""Quantum finite automata.

A :class:`Qfa` evolves a row vector through one matrix per input symbol and
accepts with probability ``|s_init U_w P_accept|^2``. Machines are immutable;
every construction below returns a new machine.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    AlphabetError,
    InvariantError,
    ModeError,
    OracleScaleError,
    SearchBoundError,
)
from .linalg import (
    DEFAULT_TOL,
    OrthonormalBasis,
    as_matrix,
    as_vector,
    direct_sum,
    frozen,
    is_unitary,
    orthonormal_complement,
    random_state,
    random_unitary,
)
from .words import Word, as_word, check_word

ORACLE_LIMIT = 10**7


@dataclass(frozen=True, eq=False)
class Qfa:
    """Finite-dimensional real-time quantum automaton.

    With ``generalized=True`` the transition matrices need not be unitary and
    the initial vector need not be normalized.
    """

    alphabet: tuple
    s_init: np.ndarray
    transitions: Mapping[str, np.ndarray]
    accept_basis: OrthonormalBasis
    generalized: bool = False

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        if len(set(alphabet)) != len(alphabet):
            raise AlphabetError("alphabet has repeated symbols")
        s = frozen(as_vector(self.s_init))
        n = s.shape[0]
        if set(self.transitions) != set(alphabet):
            raise InvariantError(
                "every alphabet symbol needs exactly one transition matrix", field="transitions"
            )
        trans = {}
        for a in alphabet:
            u = as_matrix(self.transitions[a])
            if u.shape != (n, n):
                raise InvariantError(f"U_{a} has shape {u.shape}, expected {(n, n)}", field=f"transitions/{a}")
            trans[a] = frozen(u)
        basis = self.accept_basis
        if not isinstance(basis, OrthonormalBasis):
            basis = OrthonormalBasis(basis, n)
        if basis.ambient_dim != n:
            raise InvariantError("accept basis lives in the wrong dimension", field="accept_basis")
        if not self.generalized:
            if abs(np.vdot(s, s).real - 1) >= DEFAULT_TOL:
                raise InvariantError("|s_init|^2 must be 1 for a unitary machine", field="s_init")
            for a in alphabet:
                if not is_unitary(trans[a]):
                    raise InvariantError(f"U_{a} is not unitary", field=f"transitions/{a}")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "s_init", s)
        object.__setattr__(self, "transitions", trans)
        object.__setattr__(self, "accept_basis", basis)
        object.__setattr__(self, "generalized", bool(self.generalized))

    @property
    def dim(self) -> int:
        return self.s_init.shape[0]

    def word_matrix(self, w) -> np.ndarray:
        """``U_w = U_{w_1} ... U_{w_n}`` (identity for the empty word)."""
        w = as_word(w)
        check_word(w, self.alphabet)
        out = np.eye(self.dim, dtype=complex)
        for a in w:
            out = out @ self.transitions[a]
        return out

    def run(self, w) -> np.ndarray:
        """State vector after reading ``w``."""
        w = as_word(w)
        check_word(w, self.alphabet)
        v = np.array(self.s_init)
        for a in w:
            v = v @ self.transitions[a]
        return v

    def __call__(self, w) -> float:
        return accept_probability(self, w)

    def same_as(self, other: Qfa) -> bool:
        """Exact structural equality."""
        return (
            self.alphabet == other.alphabet
            and self.generalized == other.generalized
            and np.array_equal(self.s_init, other.s_init)
            and all(np.array_equal(self.transitions[a], other.transitions[a]) for a in self.alphabet)
            and self.accept_basis == other.accept_basis
        )


def accept_probability(q: Qfa, w) -> float:
    """``f_Q(w) = sum_i |<h_i | s_init U_w>|^2``."""
    return q.accept_basis.projection_norm2(q.run(w))


def path_sum_oracle(q: Qfa, w) -> float:
    """Acceptance probability by explicit enumeration of computation paths.

    Each entry of ``s_init U_w`` is built as a sum over every sequence of
    states ``s_0, ..., s_n`` of the product of the transition amplitudes along
    it, without forming any matrix product.
    """
    w = as_word(w)
    check_word(w, q.alphabet)
    n = q.dim
    if n ** (len(w) + 1) > ORACLE_LIMIT:
        raise OracleScaleError(f"{n}^{len(w) + 1} paths exceed the oracle limit {ORACLE_LIMIT}")
    mats = [q.transitions[a] for a in w]
    final = np.zeros(n, dtype=complex)
    for path in itertools.product(range(n), repeat=len(w) + 1):
        amp = q.s_init[path[0]]
        for step, u in enumerate(mats):
            if amp == 0:
                break
            amp = amp * u[path[step], path[step + 1]]
        final[path[-1]] += amp
    return q.accept_basis.projection_norm2(final)


def _same_alphabet(q: Qfa, r: Qfa) -> None:
    if set(q.alphabet) != set(r.alphabet):
        raise AlphabetError(f"alphabets differ: {q.alphabet} vs {r.alphabet}")


def weighted_direct_sum(q: Qfa, r: Qfa, a: complex, b: complex) -> Qfa:
    """``aQ (+) bR``, recognizing ``|a|^2 f_Q + |b|^2 f_R``."""
    _same_alphabet(q, r)
    generalized = q.generalized or r.generalized
    if not generalized and abs(abs(a) ** 2 + abs(b) ** 2 - 1) >= DEFAULT_TOL:
        raise InvariantError("|a|^2 + |b|^2 must be 1 for a unitary direct sum")
    return Qfa(
        alphabet=q.alphabet,
        s_init=np.concatenate([a * q.s_init, b * r.s_init]),
        transitions={s: direct_sum(q.transitions[s], r.transitions[s]) for s in q.alphabet},
        accept_basis=q.accept_basis.direct_sum(r.accept_basis),
        generalized=generalized,
    )


def tensor(q: Qfa, r: Qfa) -> Qfa:
    """``Q (x) R``, recognizing ``f_Q * f_R``."""
    _same_alphabet(q, r)
    return Qfa(
        alphabet=q.alphabet,
        s_init=np.kron(q.s_init, r.s_init),
        transitions={s: np.kron(q.transitions[s], r.transitions[s]) for s in q.alphabet},
        accept_basis=q.accept_basis.tensor(r.accept_basis),
        generalized=q.generalized or r.generalized,
    )


def constant(c: float, alphabet: Sequence[str]) -> Qfa:
    """Two-state machine with ``f(w) = c`` for every word."""
    if not 0 <= c <= 1:
        raise InvariantError(f"constant must lie in [0, 1], got {c}")
    eye = np.eye(2, dtype=complex)
    return Qfa(
        alphabet=tuple(alphabet),
        s_init=np.array([math.sqrt(c), math.sqrt(1 - c)]),
        transitions={a: eye for a in alphabet},
        accept_basis=OrthonormalBasis.standard([0], 2),
    )


def complement(q: Qfa) -> Qfa:
    """Machine recognizing ``1 - f``; only valid for unitary machines."""
    if q.generalized:
        raise ModeError("complement needs a unitary machine; 1 - f fails for generalized ones")
    return Qfa(q.alphabet, q.s_init, q.transitions, orthonormal_complement(q.accept_basis), False)


def inverse_homomorphism(q: Qfa, h: Mapping[str, object]) -> Qfa:
    """Machine for ``w -> f(h(w))``; ``h`` maps each new symbol to a word over ``q``'s alphabet."""
    images = {a: as_word(img) for a, img in h.items()}
    for a, img in images.items():
        try:
            check_word(img, q.alphabet)
        except AlphabetError as exc:
            raise AlphabetError(f"h({a!r}): {exc}") from None
    return Qfa(
        alphabet=tuple(images),
        s_init=q.s_init,
        transitions={a: q.word_matrix(img) for a, img in images.items()},
        accept_basis=q.accept_basis,
        generalized=q.generalized,
    )


def apply_homomorphism(h: Mapping[str, object], w) -> Word:
    out: list = []
    for a in as_word(w):
        out.extend(as_word(h[a]))
    return tuple(out)


def standardize_accept(q: Qfa) -> Qfa:
    """Unitarily equivalent machine whose accept basis is ``e_0 .. e_{k-1}``.

    Completes the accept basis to a full orthonormal basis ``B`` (rows) and
    changes coordinates by ``y = v B^dagger``.
    """
    basis = q.accept_basis
    full = np.vstack([basis.vectors, orthonormal_complement(basis).vectors]) if len(basis) < q.dim else np.array(basis.vectors)
    bh = full.conj().T
    return Qfa(
        alphabet=q.alphabet,
        s_init=q.s_init @ bh,
        transitions={a: full @ u @ bh for a, u in q.transitions.items()},
        accept_basis=OrthonormalBasis.standard(range(len(basis)), q.dim),
        generalized=q.generalized,
    )


# -- pumping -----------------------------------------------------------------

def pump_tolerance(eps: float) -> float:
    """Largest operator-norm distance ``d`` with ``2d + d^2 <= eps``.

    If ``|U_w^k - 1| < d`` then ``|f(u w^k v) - f(uv)| <= 2d + d^2 <= eps``.
    """
    return math.sqrt(1.0 + eps) - 1.0


def pump_cap(eps: float, n: int) -> int:
    try:
        bound = math.ceil((eps / 4) ** (-n))
    except OverflowError:
        bound = 10**8
    return int(min(max(10**6, bound), 10**8))


def find_pump(q: Qfa, w, eps: float, chunk: int = 1 << 16) -> int:
    """Smallest ``k >= 1`` with every eigenvalue of ``U_w^k`` close enough to 1.

    Closeness is ``max_i |lambda_i^k - 1| < pump_tolerance(eps)``, which
    guarantees ``|f(u w^k v) - f(uv)| < eps`` for all ``u, v``.
    """
    if q.generalized:
        raise ModeError("pumping needs a unitary machine")
    if not 0 < eps < 2:
        raise ValueError("eps must lie in (0, 2)")
    uw = q.word_matrix(w)
    phases = np.angle(np.linalg.eigvals(uw))
    tol = pump_tolerance(eps)
    cap = pump_cap(eps, q.dim)
    start = 1
    while start <= cap:
        ks = np.arange(start, min(start + chunk, cap + 1), dtype=np.float64)
        dev = np.abs(np.exp(1j * np.outer(ks, phases)) - 1).max(axis=1)
        hit = np.flatnonzero(dev < tol)
        if hit.size:
            return int(ks[hit[0]])
        start += chunk
    raise SearchBoundError(f"no pumping constant below the cap {cap}")


def verify_pump(q: Qfa, w, k: int, eps: float, samples) -> bool:
    """True iff ``|f(u w^k v) - f(uv)| < eps`` on every sampled ``(u, v)``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    w = as_word(w)
    uwk = q.word_matrix(w) if k == 1 else np.linalg.matrix_power(q.word_matrix(w), k)
    for u, v in samples:
        u, v = as_word(u), as_word(v)
        base = accept_probability(q, u + v)
        pumped = q.accept_basis.projection_norm2(q.run(u) @ uwk @ q.word_matrix(v))
        if not abs(pumped - base) < eps:
            return False
    return True


# -- deterministic automata ----------------------------------------------------

@dataclass(frozen=True)
class Dfa:
    """Complete deterministic automaton; ``delta`` maps ``(state, symbol)`` to a state."""

    states: tuple
    alphabet: tuple
    delta: Mapping
    init: str
    accepting: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        states, alphabet = tuple(self.states), tuple(self.alphabet)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "delta", dict(self.delta))
        sset = set(states)
        if self.init not in sset:
            raise InvariantError(f"initial state {self.init!r} is not a state", field="init")
        if not self.accepting <= sset:
            raise InvariantError("accepting states must be states", field="accepting")
        for s in states:
            for a in alphabet:
                t = self.delta.get((s, a))
                if t is None:
                    raise InvariantError(f"delta is not total: missing ({s!r}, {a!r})", field="delta")
                if t not in sset:
                    raise InvariantError(f"delta({s!r}, {a!r}) = {t!r} is not a state", field="delta")

    def step(self, s, a):
        return self.delta[(s, a)]

    def accepts(self, w) -> bool:
        w = as_word(w)
        check_word(w, self.alphabet)
        s = self.init
        for a in w:
            s = self.delta[(s, a)]
        return s in self.accepting


def embed_dfa(d: Dfa) -> Qfa:
    """Generalized QFA with the DFA's 0/1 transition matrices; ``f = chi_L``."""
    index = {s: i for i, s in enumerate(d.states)}
    n = len(d.states)
    mats = {}
    for a in d.alphabet:
        m = np.zeros((n, n), dtype=complex)
        for s in d.states:
            m[index[s], index[d.step(s, a)]] = 1
        mats[a] = m
    s_init = np.zeros(n, dtype=complex)
    s_init[index[d.init]] = 1
    accept = [index[s] for s in d.states if s in d.accepting]
    return Qfa(d.alphabet, s_init, mats, OrthonormalBasis.standard(accept, n), generalized=True)


def reachable_states(d: Dfa) -> list:
    seen = {d.init}
    order = [d.init]
    for s in order:
        for a in d.alphabet:
            t = d.step(s, a)
            if t not in seen:
                seen.add(t)
                order.append(t)
    return order


def minimize(d: Dfa) -> Dfa:
    """Minimal DFA: drop unreachable states, then refine the accept/reject partition.

    States of the result are named by the first reachable state of each class.
    """
    states = reachable_states(d)
    block = {s: int(s in d.accepting) for s in states}
    while True:
        signature = {s: (block[s],) + tuple(block[d.step(s, a)] for a in d.alphabet) for s in states}
        ids: dict = {}
        new_block = {s: ids.setdefault(signature[s], len(ids)) for s in states}
        if len(ids) == len(set(block.values())):
            break
        block = new_block
    rep: dict = {}
    for s in states:
        rep.setdefault(block[s], s)
    name = {s: rep[block[s]] for s in states}
    return Dfa(
        states=tuple(rep.values()),
        alphabet=d.alphabet,
        delta={(rep[b], a): name[d.step(rep[b], a)] for b in rep for a in d.alphabet},
        init=name[d.init],
        accepting=frozenset(name[s] for s in states if s in d.accepting),
    )


def monoid_is_group(d: Dfa) -> bool:
    """Whether the transition monoid of the minimal DFA is a group.

    The monoid is a group iff every letter acts as a permutation of the minimal
    automaton's states. ``False`` means ``chi_L`` is not recognized by any
    unitary QFA.
    """
    m = minimize(d)
    n = len(m.states)
    return all(len({m.step(s, a) for s in m.states}) == n for a in m.alphabet)


# -- random machines for tests and demos --------------------------------------

def random_qfa(
    dim: int,
    alphabet: Sequence[str],
    rng: np.random.Generator,
    accept_dim: int | None = None,
) -> Qfa:
    """Unitary QFA with Haar-random matrices, state, and accept subspace."""
    if accept_dim is None:
        accept_dim = int(rng.integers(1, dim + 1))
    frame = random_unitary(dim, rng)
    return Qfa(
        alphabet=tuple(alphabet),
        s_init=random_state(dim, rng),
        transitions={a: random_unitary(dim, rng) for a in alphabet},
        accept_basis=OrthonormalBasis(frame[:accept_dim], dim),
    )
