"""Quantum push-down automata.

The Hilbert space is spanned by configurations ``(control, stack)``; stacks
are tuples with the top symbol leftmost. A machine's transition table lists
rules keyed by ``(input symbol, control, top)``, where ``top`` is ``None``
for the empty stack. Runtime states are finite-support amplitude maps.

Converted machines use tuples as control and stack-symbol names.
"""

from __future__ import annotations

import dataclasses
import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import AlphabetError, InvariantError, ModeError, SearchBoundError
from .grammar import QuantumGrammar, is_greibach, prune
from .linalg import DEFAULT_TOL
from .qfa import Qfa, standardize_accept
from .words import Word, as_word, check_word

PRUNE = 1e-15
PAD = "_"
EMPTY_STACK = "empty_stack_and_control"
CONTROL_ONLY = "control_only"
MODES = (EMPTY_STACK, CONTROL_ONLY)


class _Any:
    """Wildcard for a pop rule's ``below`` field."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ANY"

    def __reduce__(self):
        return (_Any, ())


ANY = _Any()


@dataclass(frozen=True)
class Push:
    symbol: object


@dataclass(frozen=True)
class PushWord:
    """Replace the top symbol by ``word`` (on an empty stack, push ``word``)."""

    word: tuple

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(self.word))


@dataclass(frozen=True)
class Pop:
    pass


@dataclass(frozen=True)
class Stay:
    pass


@dataclass(frozen=True)
class Rule:
    symbol: str
    from_control: object
    top: object
    action: object
    to_control: object
    amplitude: complex
    below: object = ANY

    def apply(self, stack: tuple) -> tuple:
        act = self.action
        if isinstance(act, Stay):
            return stack
        if isinstance(act, Pop):
            return stack[1:]
        if isinstance(act, Push):
            return (act.symbol,) + stack
        return act.word + stack[1:]

    def matches_below(self, stack: tuple) -> bool:
        if self.below is ANY:
            return True
        if self.below is None:
            return len(stack) == 1
        return len(stack) >= 2 and stack[1] == self.below


def _key(x) -> str:
    return repr(x)


class SparseState:
    """Finite-support amplitude map over ``(control, stack)`` basis states."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes: Mapping | Iterable = ()):
        items = amplitudes.items() if isinstance(amplitudes, Mapping) else amplitudes
        acc: dict = {}
        for (q, stack), amp in items:
            k = (q, tuple(stack))
            acc[k] = acc.get(k, 0) + complex(amp)
        self.amplitudes = {k: v for k, v in acc.items() if abs(v) >= PRUNE}

    def __len__(self):
        return len(self.amplitudes)

    def __iter__(self):
        return iter(self.keys())

    def keys(self) -> list:
        return sorted(self.amplitudes, key=_key)

    def items(self) -> list:
        return [(k, self.amplitudes[k]) for k in self.keys()]

    def get(self, q, stack=()) -> complex:
        return self.amplitudes.get((q, tuple(stack)), 0j)

    def norm2(self) -> float:
        return float(sum(abs(v) ** 2 for _, v in self.items()))

    def __add__(self, other: SparseState) -> SparseState:
        return SparseState(list(self.items()) + list(other.items()))

    def scaled(self, c: complex) -> SparseState:
        return SparseState({k: c * v for k, v in self.items()})

    def max_stack(self) -> int:
        return max((len(s) for _, s in self.amplitudes), default=0)

    def close_to(self, other: SparseState, tol: float = 1e-12) -> bool:
        keys = set(self.amplitudes) | set(other.amplitudes)
        return all(abs(self.amplitudes.get(k, 0) - other.amplitudes.get(k, 0)) <= tol for k in keys)

    def __repr__(self):
        body = ", ".join(f"({q!r}, {''.join(map(str, s)) or 'ε'}): {v:.6g}" for (q, s), v in self.items())
        return f"SparseState({{{body}}})"


@dataclass(frozen=True, eq=False)
class Qpda:
    controls: tuple
    input_alphabet: tuple
    stack_alphabet: tuple
    rules: tuple
    s_init: tuple
    accept_controls: tuple
    acceptance_mode: str = EMPTY_STACK
    unitary_claimed: bool = False
    pushes_words: bool = False

    def __post_init__(self):
        for name in ("controls", "input_alphabet", "stack_alphabet", "accept_controls"):
            object.__setattr__(self, name, tuple(dict.fromkeys(getattr(self, name))))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(
            self, "s_init", tuple((q, tuple(stack), complex(amp)) for q, stack, amp in self.s_init)
        )
        qs, ts, sigma = set(self.controls), set(self.stack_alphabet), set(self.input_alphabet)
        if self.acceptance_mode not in MODES:
            raise InvariantError(f"unknown acceptance mode {self.acceptance_mode!r}", field="acceptance_mode")
        if not set(self.accept_controls) <= qs:
            raise InvariantError("accept controls must be controls", field="accept_controls")
        for i, (q, stack, _) in enumerate(self.s_init):
            if q not in qs:
                raise InvariantError(f"unknown control {q!r}", field=f"s_init/{i}/control")
            if not set(stack) <= ts:
                raise InvariantError("stack word over unknown symbols", field=f"s_init/{i}/stack")
        if self.unitary_claimed:
            norm = sum(abs(a) ** 2 for _, _, a in self.s_init)
            if abs(norm - 1) >= DEFAULT_TOL:
                raise InvariantError("s_init must have unit norm for a unitary machine", field="s_init")
        index = defaultdict(list)
        for i, r in enumerate(self.rules):
            where = f"rules/{i}"
            if r.symbol not in sigma:
                raise InvariantError(f"unknown input symbol {r.symbol!r}", field=f"{where}/symbol")
            if r.from_control not in qs or r.to_control not in qs:
                raise InvariantError("rule names an unknown control", field=f"{where}/from_control")
            if r.top is not None and r.top not in ts:
                raise InvariantError(f"unknown stack symbol {r.top!r}", field=f"{where}/top")
            act = r.action
            if isinstance(act, Pop):
                if r.top is None:
                    raise InvariantError("cannot pop an empty stack", field=f"{where}/action")
                if r.below is not ANY and r.below is not None and r.below not in ts:
                    raise InvariantError(f"unknown stack symbol {r.below!r}", field=f"{where}/below")
            elif r.below is not ANY:
                raise InvariantError("only pop rules may consult the symbol below the top", field=f"{where}/below")
            if isinstance(act, Push) and act.symbol not in ts:
                raise InvariantError(f"unknown stack symbol {act.symbol!r}", field=f"{where}/action")
            if isinstance(act, PushWord):
                if not self.pushes_words:
                    raise InvariantError("word pushes need pushes_words=true", field=f"{where}/action")
                if not set(act.word) <= ts:
                    raise InvariantError("pushed word over unknown symbols", field=f"{where}/action")
            if not isinstance(act, (Push, PushWord, Pop, Stay)):
                raise InvariantError(f"unknown action {act!r}", field=f"{where}/action")
            if not np.isfinite(complex(r.amplitude)):
                raise InvariantError("non-finite amplitude", field=f"{where}/amplitude")
            index[(r.symbol, r.from_control, r.top)].append(r)
        object.__setattr__(self, "_index", dict(index))

    def rules_for(self, a, q, top) -> list:
        return self._index.get((a, q, top), [])

    def initial_state(self) -> SparseState:
        return SparseState([((q, s), a) for q, s, a in self.s_init])

    def has_below_rules(self) -> bool:
        return any(r.below is not ANY for r in self.rules)

    def max_push(self) -> int:
        n = 0
        for r in self.rules:
            if isinstance(r.action, Push):
                n = max(n, 1)
            elif isinstance(r.action, PushWord):
                n = max(n, len(r.action.word))
        return n

    def __call__(self, w) -> float:
        return qpda_accept_probability(self, w)

    def __repr__(self):
        return (
            f"Qpda(|Q|={len(self.controls)}, |T|={len(self.stack_alphabet)}, rules={len(self.rules)}, "
            f"mode={self.acceptance_mode}, unitary={self.unitary_claimed})"
        )


def qpda_step(p: Qpda, s: SparseState, a) -> SparseState:
    """Apply ``U_a`` to a sparse state."""
    if a not in p.input_alphabet:
        raise AlphabetError(f"symbol {a!r} is not in the input alphabet")
    out: dict = {}
    for (q, stack), amp in s.items():
        top = stack[0] if stack else None
        for r in p.rules_for(a, q, top):
            if isinstance(r.action, Pop) and not r.matches_below(stack):
                continue
            k = (r.to_control, r.apply(stack))
            out[k] = out.get(k, 0) + amp * r.amplitude
    return SparseState(out)


def qpda_run(p: Qpda, w) -> SparseState:
    w = as_word(w)
    check_word(w, p.input_alphabet)
    s = p.initial_state()
    for a in w:
        s = qpda_step(p, s, a)
    return s


def accept_mass(p: Qpda, s: SparseState) -> float:
    acc = set(p.accept_controls)
    if p.acceptance_mode == EMPTY_STACK:
        return float(sum(abs(v) ** 2 for (q, stack), v in s.items() if q in acc and not stack))
    return float(sum(abs(v) ** 2 for (q, _), v in s.items() if q in acc))


def qpda_accept_probability(p: Qpda, w) -> float:
    return accept_mass(p, qpda_run(p, w))


# -- catalogue machine ---------------------------------------------------------

def build_leq_qpda() -> Qpda:
    """Unitary machine for ``{w : #a(w) = #b(w)}``.

    Control ``A`` counts a surplus of a's on the stack, control ``B`` a
    surplus of b's. ``U_b`` is the inverse of ``U_a``; ``(B, ε)`` is a fixed
    point of both and is never reached from the initial state.
    """
    rules = [
        Rule("a", "A", None, Push("x"), "A", 1),
        Rule("a", "A", "x", Push("x"), "A", 1),
        Rule("a", "B", "x", Pop(), "A", 1, below=None),
        Rule("a", "B", "x", Pop(), "B", 1, below="x"),
        Rule("a", "B", None, Stay(), "B", 1),
        Rule("b", "A", "x", Pop(), "A", 1),
        Rule("b", "A", None, Push("x"), "B", 1),
        Rule("b", "B", "x", Push("x"), "B", 1),
        Rule("b", "B", None, Stay(), "B", 1),
    ]
    return Qpda(
        controls=("A", "B"),
        input_alphabet=("a", "b"),
        stack_alphabet=("x",),
        rules=rules,
        s_init=[("A", (), 1)],
        accept_controls=("A",),
        unitary_claimed=True,
    )


# -- grammars and machines ---------------------------------------------------

def grammar_to_qpda(g: QuantumGrammar) -> Qpda:
    """Machine with one control per amplitude coordinate.

    Reading ``a`` with ``v`` on top replaces ``v`` by ``gamma`` with amplitude
    ``c_k(v -> a gamma)`` in control ``q_k``; controls never change. The
    initial state is ``sum_k (q_k, I)`` plus ``c_k(I -> ε) (q_k, ε)`` for the
    empty word.
    """
    if not is_greibach(g):
        raise ModeError("grammar_to_qpda needs a grammar in Greibach normal form")
    controls = tuple(f"q{k}" for k in range(g.dim))
    rules = []
    s_init = []
    for k, q in enumerate(controls):
        s_init.append((q, (g.initial,), 1))
        for p in g.productions:
            c = p.amplitudes[k]
            if c == 0:
                continue
            if not p.rhs:
                s_init.append((q, (), c))
                continue
            gamma = p.rhs[1:]
            action = PushWord(gamma) if gamma else Pop()
            rules.append(Rule(p.rhs[0], q, p.lhs, action, q, c))
    return Qpda(
        controls=controls,
        input_alphabet=g.terminals,
        stack_alphabet=g.variables,
        rules=rules,
        s_init=s_init,
        accept_controls=controls,
        unitary_claimed=False,
        pushes_words=True,
    )


def qpda_to_grammar(p: Qpda) -> QuantumGrammar:
    """Grammar with variables ``[q1, t, q2]``: from ``q1`` with ``t`` on top, end at ``q2`` once ``t`` is gone.

    ``[q1, ε, q2]`` reads the rest of the input from an empty stack and ends in
    ``q2`` with an empty stack. Amplitude coordinate ``k`` belongs to the
    ``k``-th accepting control.
    """
    if p.has_below_rules():
        raise ModeError("rules consult the symbol below the top; apply expand_pop_lookahead first")
    if p.acceptance_mode != EMPTY_STACK:
        raise ModeError("qpda_to_grammar needs empty-stack acceptance")
    qs = p.controls
    accept = p.accept_controls
    dim = max(1, len(accept))
    ones = np.ones(dim, dtype=complex)
    tops = list(p.stack_alphabet) + [None]

    def var(q1, t, q2):
        return ("v", q1, "ε" if t is None else t, q2)

    def chain(q_start, word, q_end):
        """All ways to pop ``word`` symbol by symbol from ``q_start`` ending in ``q_end``."""
        if not word:
            yield ()
            return
        for mids in itertools.product(qs, repeat=len(word) - 1):
            states = (q_start,) + mids + (q_end,)
            yield tuple(var(states[i], word[i], states[i + 1]) for i in range(len(word)))

    triples = []
    for q in qs:
        triples.append((var(q, None, q), (), ones))
    for r in p.rules:
        a, q1, t, q3, c = r.symbol, r.from_control, r.top, r.to_control, complex(r.amplitude)
        amp = c * ones
        act = r.action
        if t is None:
            word = act.word if isinstance(act, PushWord) else (act.symbol,) if isinstance(act, Push) else ()
            for q2 in qs:
                for body in chain(q3, word + (None,), q2):
                    triples.append((var(q1, None, q2), (a,) + body, amp))
            continue
        if isinstance(act, Pop):
            triples.append((var(q1, t, q3), (a,), amp))
            continue
        word = {Stay: lambda: (t,), Push: lambda: (act.symbol, t)}.get(type(act), lambda: act.word)()
        for q2 in qs:
            if not word:
                if q2 == q3:
                    triples.append((var(q1, t, q2), (a,), amp))
                continue
            for body in chain(q3, word, q2):
                triples.append((var(q1, t, q2), (a,) + body, amp))
    start = "I"
    for q1, beta, c in p.s_init:
        for k, qk in enumerate(accept):
            vec = np.zeros(dim, dtype=complex)
            vec[k] = c
            for body in chain(q1, beta + (None,), qk):
                triples.append((start, body, vec))
    variables = [start] + [var(q1, t, q2) for q1 in qs for t in tops for q2 in qs]
    return prune(QuantumGrammar(variables, p.input_alphabet, start, dim, triples))


# -- structural conversions ---------------------------------------------------

def as_generalized(p: Qpda) -> Qpda:
    """The same machine with the unitarity claim dropped."""
    return dataclasses.replace(p, unitary_claimed=False) if p.unitary_claimed else p


def _require_generalized(p: Qpda, what: str) -> None:
    if p.unitary_claimed:
        raise ModeError(f"{what} is only available for generalized machines")


def expand_pop_lookahead(p: Qpda) -> Qpda:
    """Re-encode the stack pairwise so pops never consult the symbol below.

    The stack ``s t u`` becomes ``(s,t) (t,u) u``; the top pair shows the old
    top and the symbol under it.
    """
    _require_generalized(p, "expand_pop_lookahead")
    ts = p.stack_alphabet

    def encode(word):
        word = tuple(word)
        if not word:
            return ()
        return tuple(zip(word, word[1:])) + (word[-1],)

    pairs = [(s, t) for s in ts for t in ts]
    rules = []
    for r in p.rules:
        act = r.action
        if r.top is None:
            if isinstance(act, PushWord):
                act = PushWord(encode(act.word))
            rules.append(Rule(r.symbol, r.from_control, None, act, r.to_control, r.amplitude))
            continue
        t = r.top
        # old stack is exactly "t": new top is t
        if r.below is ANY or r.below is None:
            rules.append(Rule(r.symbol, r.from_control, t, _lift(act, t, None, encode), r.to_control, r.amplitude))
        # old stack "t u ...": new top is (t, u)
        for u in ts:
            if r.below is ANY or r.below == u:
                rules.append(
                    Rule(r.symbol, r.from_control, (t, u), _lift(act, t, u, encode), r.to_control, r.amplitude)
                )
    return Qpda(
        controls=p.controls,
        input_alphabet=p.input_alphabet,
        stack_alphabet=tuple(ts) + tuple(pairs),
        rules=rules,
        s_init=[(q, encode(s), a) for q, s, a in p.s_init],
        accept_controls=p.accept_controls,
        acceptance_mode=p.acceptance_mode,
        unitary_claimed=False,
        pushes_words=True,
    )


def _lift(act, t, u, encode):
    """Translate an action on top ``t`` (with ``u`` below, or nothing) to the pair encoding."""
    if isinstance(act, (Pop, Stay)):
        return act
    word = (act.symbol, t) if isinstance(act, Push) else act.word
    if not word:
        return Pop()
    if u is None:
        return PushWord(encode(word))
    return PushWord(encode(word + (u,))[:-1])


def chunk_word_pushes(p: Qpda) -> Qpda:
    """Equivalent machine whose rules only push or pop single symbols.

    Stack symbols become chunks ``(padded word, saved pointer)`` of length
    ``k`` (the longest pushed word, padded on the left with ``_``); the
    control carries a pointer ``m0`` to the current top inside the top chunk.
    A pop advances ``m0`` and discards the chunk once it is exhausted,
    restoring the saved pointer. Finally the top chunk itself is moved into
    the control, which turns chunk replacements into control changes.
    """
    _require_generalized(p, "chunk_word_pushes")
    if p.has_below_rules():
        raise ModeError("rules consult the symbol below the top; apply expand_pop_lookahead first")
    if p.acceptance_mode != EMPTY_STACK:
        raise ModeError("chunk_word_pushes needs empty-stack acceptance")
    if PAD in p.stack_alphabet:
        raise InvariantError(f"stack symbol {PAD!r} is reserved for padding", field="stack_alphabet")
    k = max(1, p.max_push(), max((1 for _, s, _ in p.s_init if s), default=1))

    def pad(word):
        return (PAD,) * (k - len(word)) + tuple(word)

    def replacement(r):
        act = r.action
        if isinstance(act, Pop):
            return ()
        if isinstance(act, Push):
            return (act.symbol, r.top) if r.top is not None else (act.symbol,)
        return act.word

    chunks = {pad((s,)) for s in p.stack_alphabet}
    for r in p.rules:
        if not isinstance(r.action, Stay):
            w = replacement(r)
            if w:
                chunks.add(pad(w))
    chunks = sorted(chunks, key=_key)
    composites = [(c, m) for c in chunks for m in range(1, k + 1)]
    below = composites + [None]
    rules = []

    def add(a, ctrl, z, action, ctrl2, amp):
        rules.append(Rule(a, ctrl, z, action, ctrl2, amp))

    for r in p.rules:
        a, q, q2, amp = r.symbol, r.from_control, r.to_control, r.amplitude
        if r.top is None:
            src = (q, 1, None)
            if isinstance(r.action, Stay):
                add(a, src, None, Stay(), (q2, 1, None), amp)
                continue
            gamma = replacement(r)
            if not gamma:
                add(a, src, None, Stay(), (q2, 1, None), amp)
            else:
                add(a, src, None, Stay(), (q2, k - len(gamma) + 1, (pad(gamma), 1)), amp)
            continue
        for x in composites:
            chunk, saved = x
            for m0 in range(1, k + 1):
                if chunk[m0 - 1] != r.top:
                    continue
                src = (q, m0, x)
                if isinstance(r.action, Stay):
                    for z in below:
                        add(a, src, z, Stay(), (q2, m0, x), amp)
                    continue
                gamma = replacement(r)
                n = len(gamma)
                if m0 < k:
                    if n == 0:
                        for z in below:
                            add(a, src, z, Stay(), (q2, m0 + 1, x), amp)
                    else:
                        y = (pad(gamma), m0 + 1)
                        for z in below:
                            add(a, src, z, Push(x), (q2, k - n + 1, y), amp)
                else:
                    if n == 0:
                        for z in composites:
                            add(a, src, z, Pop(), (q2, saved, z), amp)
                        add(a, src, None, Stay(), (q2, saved, None), amp)
                    else:
                        y = (pad(gamma), saved)
                        for z in below:
                            add(a, src, z, Stay(), (q2, k - n + 1, y), amp)
    s_init = []
    for q, stack, amp in p.s_init:
        if not stack:
            s_init.append(((q, 1, None), (), amp))
            continue
        enc = [(pad((s,)), k) for s in stack]
        enc[-1] = (pad((stack[-1],)), 1)
        s_init.append(((q, k, enc[0]), tuple(enc[1:]), amp))
    controls = [(q, m0, x) for q in p.controls for m0 in range(1, k + 1) for x in below]
    return Qpda(
        controls=controls,
        input_alphabet=p.input_alphabet,
        stack_alphabet=composites,
        rules=rules,
        s_init=s_init,
        accept_controls=[(q, 1, None) for q in p.accept_controls],
        acceptance_mode=EMPTY_STACK,
        unitary_claimed=False,
        pushes_words=False,
    )


def to_control_acceptance(p: Qpda) -> Qpda:
    """Equivalent machine accepting on control alone.

    Each control gets a marked twin that stands for "stack is empty": pops
    onto an empty stack move to marked controls, pushes from an empty stack
    leave them. The unused configurations ``(q, ε)`` and ``(marked q, σ)``
    are fixed by every ``U_a``, so unitarity is preserved.
    """
    if p.acceptance_mode != EMPTY_STACK:
        raise ModeError("machine already accepts on control alone")
    if p.pushes_words and any(isinstance(r.action, PushWord) and not r.action.word for r in p.rules):
        raise ModeError("empty word pushes are not supported; use pop rules")

    def plain(q):
        return (q, False)

    def marked(q):
        return (q, True)

    rules = []
    for r in p.rules:
        act = r.action
        if r.top is None:
            to = marked(r.to_control) if isinstance(act, Stay) else plain(r.to_control)
            rules.append(Rule(r.symbol, marked(r.from_control), None, act, to, r.amplitude))
        elif isinstance(act, Pop):
            belows = [None] + list(p.stack_alphabet) if r.below is ANY else [r.below]
            for b in belows:
                to = marked(r.to_control) if b is None else plain(r.to_control)
                rules.append(Rule(r.symbol, plain(r.from_control), r.top, act, to, r.amplitude, below=b))
        else:
            rules.append(Rule(r.symbol, plain(r.from_control), r.top, act, plain(r.to_control), r.amplitude))
    for a in p.input_alphabet:
        for q in p.controls:
            rules.append(Rule(a, plain(q), None, Stay(), plain(q), 1))
            for t in p.stack_alphabet:
                rules.append(Rule(a, marked(q), t, Stay(), marked(q), 1))
    return Qpda(
        controls=[plain(q) for q in p.controls] + [marked(q) for q in p.controls],
        input_alphabet=p.input_alphabet,
        stack_alphabet=p.stack_alphabet,
        rules=rules,
        s_init=[((marked(q) if not s else plain(q)), s, a) for q, s, a in p.s_init],
        accept_controls=[marked(q) for q in p.accept_controls],
        acceptance_mode=CONTROL_ONLY,
        unitary_claimed=p.unitary_claimed,
        pushes_words=p.pushes_words,
    )


def tensor_with_qfa(p: Qpda, q: Qfa) -> Qpda:
    """Product machine with controls ``(c, j)``: ``f = f_p * f_q``.

    The QFA is first rotated so that its accept space is spanned by standard
    basis vectors; rule amplitudes are multiplied by ``(U_a)_{ij}``.
    """
    if set(p.input_alphabet) != set(q.alphabet):
        raise AlphabetError("the machine and the QFA read different alphabets")
    q = standardize_accept(q)
    n = q.dim
    accept_idx = range(len(q.accept_basis))
    rules = []
    for r in p.rules:
        u = q.transitions[r.symbol]
        for i in range(n):
            for j in range(n):
                if u[i, j] != 0:
                    rules.append(
                        Rule(r.symbol, (r.from_control, i), r.top, r.action, (r.to_control, j), r.amplitude * u[i, j], r.below)
                    )
    s_init = [((c, j), s, a * q.s_init[j]) for c, s, a in p.s_init for j in range(n) if q.s_init[j] != 0]
    return Qpda(
        controls=[(c, j) for c in p.controls for j in range(n)],
        input_alphabet=p.input_alphabet,
        stack_alphabet=p.stack_alphabet,
        rules=rules,
        s_init=s_init,
        accept_controls=[(c, j) for c in p.accept_controls for j in accept_idx],
        acceptance_mode=p.acceptance_mode,
        unitary_claimed=p.unitary_claimed and not q.generalized,
        pushes_words=p.pushes_words,
    )


# -- unitarity ---------------------------------------------------------------

@dataclass(frozen=True)
class UnitarityReport:
    interior_unitary: bool
    max_deviation: float
    depth: int
    columns_checked: int

    def __str__(self):
        verdict = "unitary" if self.interior_unitary else "NOT unitary"
        return (
            f"interior {verdict} at depth {self.depth}: max deviation {self.max_deviation:.3e} "
            f"over {self.columns_checked} columns"
        )


MAX_TRUNCATED_BASIS = 2_000_000


def _image(p: Qpda, a, q, stack) -> dict:
    top = stack[0] if stack else None
    out: dict = {}
    for r in p.rules_for(a, q, top):
        if isinstance(r.action, Pop) and not r.matches_below(stack):
            continue
        k = (r.to_control, r.apply(stack))
        out[k] = out.get(k, 0) + complex(r.amplitude)
    return out


def _preimage_candidates(p: Qpda, a, q2, tau) -> set:
    """Configurations that some rule can map onto ``(q2, tau)``."""
    cands = set()
    for r in p.rules:
        if r.symbol != a or r.to_control != q2:
            continue
        act = r.action
        if isinstance(act, Stay):
            cands.add((r.from_control, tau))
        elif isinstance(act, Pop):
            cands.add((r.from_control, (r.top,) + tau))
        elif isinstance(act, Push):
            if tau and tau[0] == act.symbol:
                rest = tau[1:]
                if r.top is None and not rest:
                    cands.add((r.from_control, ()))
                elif rest and rest[0] == r.top:
                    cands.add((r.from_control, rest))
        else:
            w = act.word
            if tau[: len(w)] == w:
                if r.top is None and len(tau) == len(w):
                    cands.add((r.from_control, ()))
                elif r.top is not None:
                    cands.add((r.from_control, (r.top,) + tau[len(w):]))
    return cands


def _gram_deviation(columns: dict) -> float:
    """``max |G - 1|`` for the Gram matrix of sparse column vectors."""
    inverted = defaultdict(list)
    for c, vec in columns.items():
        for k, v in vec.items():
            inverted[k].append((c, v))
    gram: dict = defaultdict(complex)
    for entries in inverted.values():
        for (c1, v1), (c2, v2) in itertools.product(entries, entries):
            gram[c1, c2] += v1.conjugate() * v2
    dev = 0.0
    for c in columns:
        dev = max(dev, abs(gram.get((c, c), 0) - 1))
    for (c1, c2), v in gram.items():
        if c1 != c2:
            dev = max(dev, abs(v))
    return dev


def check_unitarity_truncated(p: Qpda, depth: int) -> UnitarityReport:
    """Check ``U_a`` on configurations whose images stay within stack depth ``depth``.

    Both the images of interior configurations (isometry) and the preimages
    of interior configurations (co-isometry) must be orthonormal within
    1e-9. Boundary configurations cannot be judged from a finite window and
    are skipped.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    growth = max(1, p.max_push() - 1)
    inner = depth - growth
    ts = p.stack_alphabet
    size = len(p.controls) * sum(len(ts) ** n for n in range(max(inner, 0) + 1))
    if size > MAX_TRUNCATED_BASIS:
        raise SearchBoundError(f"{size} interior configurations exceed the limit {MAX_TRUNCATED_BASIS}")
    interior = [(q, s) for n in range(max(inner, -1) + 1) for s in itertools.product(ts, repeat=n) for q in p.controls]
    dev = 0.0
    for a in p.input_alphabet:
        cols = {c: _image(p, a, *c) for c in interior}
        dev = max(dev, _gram_deviation(cols))
        rows: dict = {}
        for q2, tau in interior:
            row = {}
            for src in _preimage_candidates(p, a, q2, tau):
                v = _image(p, a, *src).get((q2, tau), 0)
                if v != 0:
                    row[src] = v.conjugate()
            rows[(q2, tau)] = row
        dev = max(dev, _gram_deviation(rows))
    return UnitarityReport(dev < DEFAULT_TOL, float(dev), depth, len(interior) * len(p.input_alphabet))
