"""Quantum context-free grammars.

Every production carries a vector of ``dim`` complex amplitudes. The
amplitude of a derivation is the coordinatewise product of its productions'
amplitudes, a word's amplitude vector sums over all its derivations, and its
probability is the squared norm of that vector.

The normal-form transformations attach amplitudes to the classical
constructions so that every derivation of the old grammar corresponds to
exactly one derivation of the new one with the same amplitude; each stage is
checked extensionally in the test-suite.
"""

from __future__ import annotations

import cmath
import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AlphabetError,
    DivergenceError,
    GrammarFormError,
    InvariantError,
    UnsupportedGrammarError,
)
from .linalg import OrthonormalBasis
from .qfa import Qfa
from .words import Word, as_word, check_word

EPS_ZERO = 0.0


def parse_rhs(rhs) -> tuple:
    """``"aIbI" -> ('a','I','b','I')``; whitespace-separated strings split on spaces."""
    if isinstance(rhs, str):
        return tuple(rhs.split()) if any(ch.isspace() for ch in rhs) else tuple(rhs)
    return tuple(rhs)


@dataclass(frozen=True, eq=False)
class Production:
    lhs: str
    rhs: tuple
    amplitudes: np.ndarray

    def __repr__(self):
        amps = ", ".join(f"{complex(c):.4g}" for c in self.amplitudes)
        return f"{self.lhs} -> {' '.join(self.rhs) or 'ε'} [{amps}]"


class QuantumGrammar:
    """Context-free quantum grammar.

    Productions with the same ``(lhs, rhs)`` are merged by adding their
    amplitudes (an equivalent grammar), and productions whose amplitudes are
    all zero are dropped.
    """

    def __init__(self, variables, terminals, initial, dim, productions):
        self.variables = tuple(dict.fromkeys(variables))
        self.terminals = tuple(dict.fromkeys(terminals))
        self.initial = initial
        self.dim = int(dim)
        if self.dim < 1:
            raise InvariantError("dimensionality must be at least 1", field="dim")
        vset, tset = set(self.variables), set(self.terminals)
        if vset & tset:
            raise InvariantError(f"variables and terminals overlap: {sorted(vset & tset)}", field="terminals")
        if initial not in vset:
            raise InvariantError(f"initial variable {initial!r} is not a variable", field="initial")
        merged: dict = {}
        for i, p in enumerate(productions):
            lhs, rhs, amps = p if isinstance(p, tuple) else (p.lhs, p.rhs, p.amplitudes)
            rhs = tuple(rhs)
            if lhs not in vset:
                raise InvariantError(f"production lhs {lhs!r} is not a single variable", field=f"productions/{i}/lhs")
            for s in rhs:
                if s not in vset and s not in tset:
                    raise InvariantError(f"unknown symbol {s!r} in production", field=f"productions/{i}/rhs")
            amps = np.broadcast_to(np.asarray(amps, dtype=complex), (self.dim,)).copy()
            if not np.all(np.isfinite(amps)):
                raise InvariantError("non-finite amplitude", field=f"productions/{i}/amplitudes")
            key = (lhs, rhs)
            merged[key] = merged[key] + amps if key in merged else amps
        prods = []
        for (lhs, rhs), amps in merged.items():
            if np.any(amps != 0):
                amps.setflags(write=False)
                prods.append(Production(lhs, rhs, amps))
        self.productions = tuple(prods)
        by_lhs = defaultdict(list)
        for p in self.productions:
            by_lhs[p.lhs].append(p)
        self._by_lhs = {v: tuple(by_lhs[v]) for v in self.variables}

    @classmethod
    def from_rules(cls, rules: Iterable, initial: str, terminals=None, dim: int | None = None, variables=None):
        """Build from ``(lhs, rhs, amplitude)`` triples; ``rhs`` may be a string.

        Variables default to every left-hand side (plus ``initial``); terminals
        default to every other right-hand-side symbol.
        """
        triples = [(lhs, parse_rhs(rhs), amp) for lhs, rhs, amp in rules]
        vs = list(dict.fromkeys([initial] + [lhs for lhs, _, _ in triples] + list(variables or ())))
        if terminals is None:
            terminals = [s for _, rhs, _ in triples for s in rhs if s not in vs]
        if dim is None:
            dim = max((np.size(amp) for _, _, amp in triples), default=1)
        return cls(vs, terminals, initial, dim, triples)

    def __repr__(self):
        return f"QuantumGrammar(initial={self.initial!r}, dim={self.dim}, |V|={len(self.variables)}, |P|={len(self.productions)})"

    def __str__(self):
        return "\n".join(repr(p) for p in self.productions)

    def productions_of(self, v) -> tuple:
        return self._by_lhs.get(v, ())

    def is_terminal(self, s) -> bool:
        return s not in self._by_lhs

    def rules(self) -> list:
        return [(p.lhs, p.rhs, p.amplitudes) for p in self.productions]

    def same_as(self, other: QuantumGrammar) -> bool:
        if (self.variables, self.terminals, self.initial, self.dim) != (
            other.variables, other.terminals, other.initial, other.dim
        ):
            return False
        a = {(p.lhs, p.rhs): p.amplitudes for p in self.productions}
        b = {(p.lhs, p.rhs): p.amplitudes for p in other.productions}
        return a.keys() == b.keys() and all(np.array_equal(a[k], b[k]) for k in a)

    def with_productions(self, productions, variables=None, initial=None) -> QuantumGrammar:
        return QuantumGrammar(
            self.variables if variables is None else variables,
            self.terminals,
            self.initial if initial is None else initial,
            self.dim,
            productions,
        )


# -- structure -----------------------------------------------------------------

def _start_epsilon_ok(g: QuantumGrammar) -> bool:
    """Only the initial variable has an empty production, and it is on no right-hand side."""
    eps_lhs = {p.lhs for p in g.productions if not p.rhs}
    if not eps_lhs:
        return True
    if eps_lhs != {g.initial}:
        return False
    return all(g.initial not in p.rhs for p in g.productions)


def is_greibach(g: QuantumGrammar) -> bool:
    for p in g.productions:
        if not p.rhs:
            continue
        if not g.is_terminal(p.rhs[0]) or any(g.is_terminal(s) for s in p.rhs[1:]):
            return False
    return _start_epsilon_ok(g)


def is_chomsky(g: QuantumGrammar) -> bool:
    for p in g.productions:
        if not p.rhs:
            continue
        single_terminal = len(p.rhs) == 1 and g.is_terminal(p.rhs[0])
        two_variables = len(p.rhs) == 2 and not any(g.is_terminal(s) for s in p.rhs)
        if not (single_terminal or two_variables):
            return False
    return _start_epsilon_ok(g)


def is_regular(g: QuantumGrammar) -> bool:
    """Every rhs is a terminal word optionally followed by one variable."""
    for p in g.productions:
        body = p.rhs[:-1] if p.rhs and not g.is_terminal(p.rhs[-1]) else p.rhs
        if any(not g.is_terminal(s) for s in body):
            return False
    return True


def is_normalized_regular(g: QuantumGrammar) -> bool:
    """Every rhs is ``a v`` or ``a``, apart from an allowed start-only ``I -> ε``."""
    for p in g.productions:
        if not p.rhs:
            continue
        if not g.is_terminal(p.rhs[0]) or len(p.rhs) > 2:
            return False
        if len(p.rhs) == 2 and g.is_terminal(p.rhs[1]):
            return False
    return _start_epsilon_ok(g)


def grammar_forms(g: QuantumGrammar) -> set:
    tags = {"general"}
    if is_chomsky(g):
        tags.add("chomsky")
    if is_greibach(g):
        tags.add("greibach")
    if is_regular(g):
        tags.add("regular")
    return tags


def nullable_variables(g: QuantumGrammar) -> set:
    """Variables with at least one derivation of the empty word (structurally)."""
    nullable: set = set()
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.lhs not in nullable and all(s in nullable for s in p.rhs):
                nullable.add(p.lhs)
                changed = True
    return nullable


def _span_graph(g: QuantumGrammar, nullable: set) -> dict:
    """``v -> u`` when some ``v -> alpha u beta`` has ``alpha``, ``beta`` nullable.

    A derivation may then rewrite ``v`` into ``u`` without consuming input, so a
    cycle means infinitely many derivations of some word.
    """
    edges = defaultdict(set)
    for p in g.productions:
        for i, s in enumerate(p.rhs):
            if g.is_terminal(s):
                continue
            if all(x in nullable for x in p.rhs[:i]) and all(x in nullable for x in p.rhs[i + 1:]):
                edges[p.lhs].add(s)
    return edges


def _find_cycle(edges: Mapping) -> list | None:
    color: dict = {}
    stack: list = []

    def visit(v):
        color[v] = 1
        stack.append(v)
        for u in sorted(edges.get(v, ())):
            if color.get(u) == 1:
                return stack[stack.index(u):] + [u]
            if u not in color:
                found = visit(u)
                if found:
                    return found
        stack.pop()
        color[v] = 2
        return None

    for v in sorted(edges):
        if v not in color:
            found = visit(v)
            if found:
                return found
    return None


def check_termination(g: QuantumGrammar) -> None:
    """Raise if some word has infinitely many derivations.

    That happens exactly when a variable can rewrite to itself while every
    other symbol produced along the way derives the empty word.
    """
    cycle = _find_cycle(_span_graph(g, nullable_variables(g)))
    if cycle:
        raise UnsupportedGrammarError(
            "derivation cycle that consumes no input: " + " -> ".join(cycle)
            + " (resum unit cycles with eliminate_unit_productions)"
        )


# -- evaluation ----------------------------------------------------------------

class _Inside:
    """Memoized span dynamic program over an arbitrary context-free grammar."""

    def __init__(self, g: QuantumGrammar, w: Word):
        self.g = g
        self.w = w
        self.nullable = nullable_variables(g)
        self.zero = np.zeros(g.dim, dtype=complex)
        self.one = np.ones(g.dim, dtype=complex)
        self.var_memo: dict = {}
        self.seq_memo: dict = {}
        self.minlen = {}
        for idx, p in enumerate(g.productions):
            tail = [0] * (len(p.rhs) + 1)
            for pos in range(len(p.rhs) - 1, -1, -1):
                s = p.rhs[pos]
                tail[pos] = tail[pos + 1] + (0 if s in self.nullable else 1)
            self.minlen[idx] = tail
        self.index = {id(p): i for i, p in enumerate(g.productions)}

    def var(self, v, i, j):
        key = (v, i, j)
        hit = self.var_memo.get(key)
        if hit is not None:
            return hit
        total = self.zero
        for p in self.g.productions_of(v):
            part = self.seq(self.index[id(p)], 0, i, j)
            if part is not None:
                total = total + p.amplitudes * part
        self.var_memo[key] = total
        return total

    def seq(self, idx, pos, i, j):
        """Amplitude of ``rhs[pos:]`` deriving ``w[i:j]``; ``None`` for zero."""
        key = (idx, pos, i, j)
        if key in self.seq_memo:
            return self.seq_memo[key]
        p = self.g.productions[idx]
        tail = self.minlen[idx]
        result = None
        if tail[pos] > j - i:
            pass
        elif pos == len(p.rhs):
            result = self.one if i == j else None
        else:
            s = p.rhs[pos]
            if self.g.is_terminal(s):
                if i < j and self.w[i] == s:
                    result = self.seq(idx, pos + 1, i + 1, j)
            else:
                lo = i if s in self.nullable else i + 1
                hi = j - tail[pos + 1]
                acc = None
                for m in range(lo, hi + 1):
                    rest = self.seq(idx, pos + 1, m, j)
                    if rest is None:
                        continue
                    head = self.var(s, i, m)
                    if not np.any(head):
                        continue
                    acc = head * rest if acc is None else acc + head * rest
                result = acc
        self.seq_memo[key] = result
        return result


def inside_amplitudes(g: QuantumGrammar, w) -> np.ndarray:
    """Amplitudes by a span dynamic program valid for any terminating grammar."""
    w = as_word(w)
    check_word(w, g.terminals)
    check_termination(g)
    return np.array(_Inside(g, w).var(g.initial, 0, len(w)))


def greibach_amplitudes(g: QuantumGrammar, w) -> np.ndarray:
    """Amplitudes of a Greibach-form grammar by enumerating ``|w|``-step leftmost derivations.

    Sentential forms are tracked as the string of pending variables; one
    production (hence one terminal) is applied per input symbol.
    """
    if not is_greibach(g):
        raise GrammarFormError("grammar is not in Greibach normal form")
    w = as_word(w)
    check_word(w, g.terminals)
    if not w:
        out = np.zeros(g.dim, dtype=complex)
        for p in g.productions_of(g.initial):
            if not p.rhs:
                out = out + p.amplitudes
        return out
    forms = {(g.initial,): np.ones(g.dim, dtype=complex)}
    for pos, a in enumerate(w):
        remaining = len(w) - pos - 1
        nxt: dict = {}
        for form in sorted(forms):
            amp = forms[form]
            if not form:
                continue
            head, rest = form[0], form[1:]
            for p in g.productions_of(head):
                if not p.rhs or p.rhs[0] != a:
                    continue
                new = p.rhs[1:] + rest
                if len(new) > remaining:
                    continue
                contrib = amp * p.amplitudes
                nxt[new] = nxt[new] + contrib if new in nxt else contrib
        forms = nxt
    return np.array(forms.get((), np.zeros(g.dim, dtype=complex)))


def cyk_amplitudes(g: QuantumGrammar, w) -> np.ndarray:
    """Amplitudes of a Chomsky-form grammar by the CYK span recursion."""
    if not is_chomsky(g):
        raise GrammarFormError("grammar is not in Chomsky normal form")
    w = as_word(w)
    check_word(w, g.terminals)
    n = len(w)
    zero = np.zeros(g.dim, dtype=complex)
    if n == 0:
        out = zero.copy()
        for p in g.productions_of(g.initial):
            if not p.rhs:
                out = out + p.amplitudes
        return out
    table: dict = {}
    for i, a in enumerate(w):
        cell: dict = {}
        for p in g.productions:
            if p.rhs == (a,):
                cell[p.lhs] = cell.get(p.lhs, zero) + p.amplitudes
        table[i, i + 1] = cell
    binary = [p for p in g.productions if len(p.rhs) == 2]
    for span in range(2, n + 1):
        for i in range(n - span + 1):
            j = i + span
            cell = {}
            for m in range(i + 1, j):
                left, right = table[i, m], table[m, j]
                if not left or not right:
                    continue
                for p in binary:
                    b, c = p.rhs
                    if b in left and c in right:
                        cell[p.lhs] = cell.get(p.lhs, zero) + p.amplitudes * left[b] * right[c]
            table[i, j] = cell
    return np.array(table[0, n].get(g.initial, zero))


def derive_amplitudes(g: QuantumGrammar, w, method: str = "auto") -> np.ndarray:
    """Amplitude vector ``(c_1(w), ..., c_n(w))`` summed over all derivations.

    ``method`` is ``"greibach"``, ``"cyk"``, ``"inside"`` or ``"auto"`` (pick
    by the grammar's form).
    """
    if method == "auto":
        method = "greibach" if is_greibach(g) else "cyk" if is_chomsky(g) else "inside"
    if method == "greibach":
        return greibach_amplitudes(g, w)
    if method == "cyk":
        return cyk_amplitudes(g, w)
    if method == "inside":
        return inside_amplitudes(g, w)
    raise ValueError(f"unknown evaluation method {method!r}")


def f_of_word(g: QuantumGrammar, w, method: str = "auto") -> float:
    return float(np.sum(np.abs(derive_amplitudes(g, w, method)) ** 2))


# -- naming --------------------------------------------------------------------

class _Names:
    """Fresh-name supply that never collides with existing symbols."""

    def __init__(self, taken: Iterable[str]):
        self.taken = set(taken)

    def fresh(self, base: str) -> str:
        name = base
        n = 1
        while name in self.taken:
            n += 1
            name = f"{base}{n}"
        self.taken.add(name)
        return name


def _names_for(g: QuantumGrammar) -> _Names:
    return _Names(set(g.variables) | set(g.terminals))


# -- normal forms -------------------------------------------------------------

def _prod_map(g: QuantumGrammar) -> dict:
    out: dict = {v: {} for v in g.variables}
    for p in g.productions:
        out[p.lhs][p.rhs] = np.array(p.amplitudes)
    return out


def _add(bucket: dict, rhs: tuple, amps: np.ndarray) -> None:
    bucket[rhs] = bucket[rhs] + amps if rhs in bucket else np.array(amps)


def _from_map(g: QuantumGrammar, prods: Mapping, variables, initial=None) -> QuantumGrammar:
    triples = [(v, rhs, amps) for v in prods for rhs, amps in prods[v].items()]
    return QuantumGrammar(variables, g.terminals, g.initial if initial is None else initial, g.dim, triples)


def epsilon_amplitudes(g: QuantumGrammar) -> dict:
    """``c(v => ε)`` for every variable (zero vector when not nullable)."""
    check_termination(g)
    inside = _Inside(g, ())
    return {v: np.array(inside.var(v, 0, 0)) for v in g.variables}


def eliminate_epsilon(g: QuantumGrammar) -> QuantumGrammar:
    """Equivalent grammar whose only empty production is ``S -> ε`` for a start ``S`` on no rhs.

    Each production is replaced by every variant obtained by deleting some
    nullable occurrences, weighted by the product of their ``c(X => ε)``.
    A fresh start variable is introduced when the old one is nullable and
    occurs on a right-hand side.
    """
    if _start_epsilon_ok(g):
        return g
    eps = epsilon_amplitudes(g)
    nullable = {v for v, a in eps.items() if np.any(a != 0)}
    prods: dict = {v: {} for v in g.variables}
    for p in g.productions:
        spots = [i for i, s in enumerate(p.rhs) if s in nullable]
        for r in range(len(spots) + 1):
            for dropped in itertools.combinations(spots, r):
                rhs = tuple(s for i, s in enumerate(p.rhs) if i not in dropped)
                if not rhs:
                    continue
                amps = np.array(p.amplitudes)
                for i in dropped:
                    amps = amps * eps[p.rhs[i]]
                _add(prods[p.lhs], rhs, amps)
    variables = list(g.variables)
    initial = g.initial
    start_eps = eps[g.initial]
    if np.any(start_eps != 0):
        on_rhs = any(g.initial in rhs for bucket in prods.values() for rhs in bucket)
        if on_rhs:
            initial = _names_for(g).fresh(f"{g.initial}0")
            variables.insert(0, initial)
            prods[initial] = {rhs: np.array(a) for rhs, a in prods[g.initial].items()}
        prods[initial][()] = start_eps
    return _from_map(g, prods, variables, initial)


def eliminate_unit_productions(g: QuantumGrammar) -> QuantumGrammar:
    """Resum chains of unit productions ``v_i -> v_j`` into the non-unit ones.

    ``c'(v_i -> beta) = sum_j ((1 - M)^{-1})_{ij} c(v_j -> beta)`` per
    amplitude coordinate, where ``M_ij = c(v_i -> v_j)``.
    """
    vs = list(g.variables)
    idx = {v: i for i, v in enumerate(vs)}
    m = len(vs)
    units = [p for p in g.productions if len(p.rhs) == 1 and not g.is_terminal(p.rhs[0])]
    if not units:
        return g
    reach = np.eye(m, dtype=bool)
    adj = np.zeros((m, m), dtype=bool)
    for p in units:
        adj[idx[p.lhs], idx[p.rhs[0]]] = True
    for _ in range(m):
        reach = reach | (reach.astype(int) @ adj.astype(int) > 0)
    resolvents = []
    for k in range(g.dim):
        mk = np.zeros((m, m), dtype=complex)
        for p in units:
            mk[idx[p.lhs], idx[p.rhs[0]]] += p.amplitudes[k]
        a = np.eye(m) - mk
        if np.linalg.cond(a) > 1e12:
            raise DivergenceError(f"1 - M is singular in amplitude coordinate {k}")
        radius = np.max(np.abs(np.linalg.eigvals(mk)))
        if radius >= 1:
            raise DivergenceError(
                f"unit-production amplitudes diverge in coordinate {k} (spectral radius {radius:.3g})"
            )
        r = np.linalg.inv(a)
        r[~reach] = 0
        resolvents.append(r)
    res = np.array(resolvents)  # (dim, m, m)
    prods: dict = {v: {} for v in vs}
    for p in g.productions:
        if len(p.rhs) == 1 and not g.is_terminal(p.rhs[0]):
            continue
        j = idx[p.lhs]
        for i in range(m):
            if reach[i, j]:
                _add(prods[vs[i]], p.rhs, res[:, i, j] * p.amplitudes)
    return _from_map(g, prods, vs)


def to_chomsky(g: QuantumGrammar) -> QuantumGrammar:
    """Chomsky form: wrap terminals in long bodies, then split bodies into chains.

    The chain ``v -> b_1 d_1, d_1 -> b_2 d_2, ...`` carries the original
    amplitude on its first production and 1 on the others.
    """
    if any(len(p.rhs) == 1 and not g.is_terminal(p.rhs[0]) for p in g.productions):
        raise GrammarFormError("eliminate unit productions before converting to Chomsky form")
    if not _start_epsilon_ok(g):
        raise GrammarFormError("only a start variable absent from all bodies may have an empty production")
    if is_chomsky(g):
        return g
    names = _names_for(g)
    ones = np.ones(g.dim, dtype=complex)
    variables = list(g.variables)
    prods: dict = {v: {} for v in variables}
    wrapper: dict = {}

    def wrap(s):
        if not g.is_terminal(s):
            return s
        if s not in wrapper:
            wrapper[s] = names.fresh(f"A_{s}")
            variables.append(wrapper[s])
            prods[wrapper[s]] = {(s,): ones.copy()}
        return wrapper[s]

    for p in g.productions:
        if len(p.rhs) <= 1:
            _add(prods[p.lhs], p.rhs, p.amplitudes)
            continue
        body = [wrap(s) for s in p.rhs]
        lhs, amps = p.lhs, p.amplitudes
        while len(body) > 2:
            d = names.fresh(f"{p.lhs}_")
            variables.append(d)
            prods[d] = {}
            _add(prods[lhs], (body[0], d), amps)
            lhs, amps, body = d, ones, body[1:]
        _add(prods[lhs], tuple(body), amps)
    return _from_map(g, prods, variables)


def _remove_immediate_left_recursion(prods: dict, v: str, names: _Names, variables: list) -> str | None:
    """``v -> v alpha | beta``  becomes  ``v -> beta | beta b``, ``b -> alpha | alpha b``."""
    bucket = prods[v]
    recursive = {rhs[1:]: amps for rhs, amps in bucket.items() if rhs and rhs[0] == v}
    if not recursive:
        return None
    if () in recursive:
        raise GrammarFormError(f"unit production {v} -> {v}; eliminate unit productions first")
    others = {rhs: amps for rhs, amps in bucket.items() if not (rhs and rhs[0] == v)}
    b = names.fresh(f"{v}'")
    variables.append(b)
    prods[v] = {}
    for beta, amps in others.items():
        _add(prods[v], beta, amps)
        if beta:
            _add(prods[v], beta + (b,), amps)
    prods[b] = {}
    for alpha, amps in recursive.items():
        _add(prods[b], alpha, amps)
        _add(prods[b], alpha + (b,), amps)
    return b


def eliminate_left_recursion(g: QuantumGrammar) -> QuantumGrammar:
    """Remove every immediate left recursion ``v -> v alpha``."""
    names = _names_for(g)
    variables = list(g.variables)
    prods = _prod_map(g)
    for v in list(g.variables):
        _remove_immediate_left_recursion(prods, v, names, variables)
    return _from_map(g, prods, variables)


def _substitute_head(prods: dict, v: str, head: str) -> bool:
    """Replace every ``v -> head gamma`` by ``v -> beta gamma`` for each ``head -> beta``."""
    bucket = prods[v]
    hits = [(rhs, amps) for rhs, amps in bucket.items() if rhs and rhs[0] == head]
    if not hits:
        return False
    for rhs, _ in hits:
        del bucket[rhs]
    for rhs, amps in hits:
        for beta, bamps in list(prods[head].items()):
            _add(bucket, beta + rhs[1:], amps * bamps)
    return True


def prune(g: QuantumGrammar) -> QuantumGrammar:
    """Drop variables unreachable from the initial one."""
    seen = {g.initial}
    order = [g.initial]
    for v in order:
        for p in g.productions_of(v):
            for s in p.rhs:
                if not g.is_terminal(s) and s not in seen:
                    seen.add(s)
                    order.append(s)
    return QuantumGrammar(
        [v for v in g.variables if v in seen],
        g.terminals,
        g.initial,
        g.dim,
        [p for p in g.productions if p.lhs in seen],
    )


def to_greibach(g: QuantumGrammar) -> QuantumGrammar:
    """Equivalent grammar in Greibach normal form.

    Pipeline: empty-production elimination, unit elimination, Chomsky form,
    then the ordered substitution / left-recursion removal loop, and a final
    back-substitution of leading variables. An empty production survives only
    on a start variable that occurs on no right-hand side.
    """
    if is_greibach(g):
        return g
    g = to_chomsky(eliminate_unit_productions(eliminate_epsilon(g)))
    g = prune(g)
    names = _names_for(g)
    order = list(g.variables)
    rank = {v: i for i, v in enumerate(order)}
    variables = list(order)
    prods = _prod_map(g)
    added = []
    for k, ak in enumerate(order):
        while True:
            heads = sorted(
                {rhs[0] for rhs in prods[ak] if rhs and rhs[0] in rank and rank[rhs[0]] < k},
                key=rank.get,
            )
            if not heads:
                break
            _substitute_head(prods, ak, heads[0])
        b = _remove_immediate_left_recursion(prods, ak, names, variables)
        if b is not None:
            added.append(b)
    terminal = set(g.terminals)
    for ak in reversed(order):
        while True:
            heads = {rhs[0] for rhs in prods[ak] if rhs and rhs[0] not in terminal}
            if not heads:
                break
            for h in sorted(heads, key=lambda s: rank.get(s, len(rank))):
                _substitute_head(prods, ak, h)
    for b in added:
        while True:
            heads = {rhs[0] for rhs in prods[b] if rhs and rhs[0] not in terminal}
            if not heads:
                break
            for h in sorted(heads):
                _substitute_head(prods, b, h)
    out = prune(_from_map(g, prods, variables))
    if not is_greibach(out):
        raise GrammarFormError("internal error: conversion did not reach Greibach normal form")
    return out


# -- closure and interference -------------------------------------------------

def rename(g: QuantumGrammar, suffix: str) -> QuantumGrammar:
    m = {v: f"{v}{suffix}" for v in g.variables}
    return QuantumGrammar(
        [m[v] for v in g.variables],
        g.terminals,
        m[g.initial],
        g.dim,
        [(m[p.lhs], tuple(m.get(s, s) for s in p.rhs), p.amplitudes) for p in g.productions],
    )


def _check_terminals(grammars: Sequence[QuantumGrammar]) -> None:
    first = set(grammars[0].terminals)
    for other in grammars[1:]:
        if set(other.terminals) != first:
            raise AlphabetError(f"terminal alphabets differ: {sorted(first)} vs {sorted(other.terminals)}")


def _union_terminals(grammars) -> list:
    return list(dict.fromkeys(t for g in grammars for t in g.terminals))


def grammar_sum(g1: QuantumGrammar, g2: QuantumGrammar) -> QuantumGrammar:
    """Grammar generating ``f_1 + f_2`` in ``m + n`` amplitude coordinates."""
    _check_terminals([g1, g2])
    a, b = rename(g1, ":1"), rename(g2, ":2")
    m, n = g1.dim, g2.dim
    k = _Names(set(a.variables) | set(b.variables) | set(g1.terminals)).fresh("K")
    triples = [(k, (a.initial,), np.ones(m + n)), (k, (b.initial,), np.ones(m + n))]
    triples += [(p.lhs, p.rhs, np.concatenate([p.amplitudes, np.zeros(n)])) for p in a.productions]
    triples += [(p.lhs, p.rhs, np.concatenate([np.zeros(m), p.amplitudes])) for p in b.productions]
    return QuantumGrammar([k, *a.variables, *b.variables], _union_terminals([g1, g2]), k, m + n, triples)


def interference(grammars: Sequence[QuantumGrammar], weights: Sequence[complex]) -> QuantumGrammar:
    """One-dimensional grammar ``I -> I_j`` with amplitude ``weights[j]`` for each sub-grammar."""
    if len(grammars) != len(weights):
        raise ValueError("one weight per grammar")
    for g in grammars:
        if g.dim != 1:
            raise InvariantError("interference constructions need one-dimensional grammars", field="dim")
    _check_terminals(list(grammars))
    parts = [rename(g, f":{i + 1}") for i, g in enumerate(grammars)]
    taken = {v for p in parts for v in p.variables} | set(grammars[0].terminals)
    start = _Names(taken).fresh("I")
    triples = [(start, (p.initial,), w) for p, w in zip(parts, weights)]
    triples += [(q.lhs, q.rhs, q.amplitudes) for p in parts for q in p.productions]
    variables = [start] + [v for p in parts for v in p.variables]
    return QuantumGrammar(variables, _union_terminals(grammars), start, 1, triples)


def symmetric_difference(g1: QuantumGrammar, g2: QuantumGrammar) -> QuantumGrammar:
    """``I -> I_1`` (amplitude 1), ``I -> I_2`` (amplitude -1); for 0/1 grammars ``f = chi(L1 xor L2)``."""
    return interference([g1, g2], [1, -1])


def three_way_interference(g1, g2, g3) -> QuantumGrammar:
    """Amplitudes ``1, e^{2 pi i/3}, e^{4 pi i/3}``: ``f = 1`` on one or two memberships, 0 otherwise."""
    return interference([g1, g2, g3], [1, cmath.exp(2j * cmath.pi / 3), cmath.exp(4j * cmath.pi / 3)])


def embed_unambiguous(rules: Iterable, initial: str, terminals=None) -> QuantumGrammar:
    """One-dimensional grammar with amplitude 1 on every listed production.

    For an unambiguous grammar ``c(w) = f(w) = chi_L(w)``; unambiguity is the
    caller's responsibility.
    """
    return QuantumGrammar.from_rules([(lhs, rhs, 1) for lhs, rhs in rules], initial, terminals, dim=1)


# -- regular grammars and QFAs -----------------------------------------------

def normalize_regular(g: QuantumGrammar) -> QuantumGrammar:
    """Regular grammar whose bodies are all ``a v`` or ``a`` (plus an optional start ``S -> ε``)."""
    if not is_regular(g):
        raise GrammarFormError("grammar is not regular")
    if is_normalized_regular(g):
        return g
    g = eliminate_unit_productions(eliminate_epsilon(g))
    names = _names_for(g)
    ones = np.ones(g.dim, dtype=complex)
    variables = list(g.variables)
    prods: dict = {v: {} for v in variables}
    for p in g.productions:
        body = list(p.rhs)
        lhs, amps = p.lhs, p.amplitudes
        tail = body.pop() if body and not g.is_terminal(body[-1]) else None
        while len(body) > 1:
            d = names.fresh(f"{p.lhs}_")
            variables.append(d)
            prods[d] = {}
            _add(prods[lhs], (body[0], d), amps)
            lhs, amps, body = d, ones, body[1:]
        _add(prods[lhs], tuple(body) + ((tail,) if tail else ()), amps)
    out = _from_map(g, prods, variables)
    if not is_normalized_regular(out):
        raise GrammarFormError("internal error: regular normalization failed")
    return out


def regular_to_qfa(g: QuantumGrammar) -> Qfa:
    """Generalized QFA with ``f(w) = sum_k |c_k(w)|^2``.

    Coordinate ``k`` gets an ``(m+1)``-state block: ``(U_a)_{ij} = c_k(v_i -> a v_j)``
    and ``(U_a)_{i,m} = c_k(v_i -> a)``; the blocks are direct-summed. The
    extra state starts with amplitude ``c_k(I -> ε)``, so the empty word gets
    its amplitude from the start production.
    """
    if not is_normalized_regular(g):
        raise GrammarFormError("regular_to_qfa needs a normalized regular grammar (see normalize_regular)")
    vs = list(g.variables)
    idx = {v: i for i, v in enumerate(vs)}
    m = len(vs)
    size = m + 1
    n = g.dim * size
    mats = {a: np.zeros((n, n), dtype=complex) for a in g.terminals}
    s_init = np.zeros(n, dtype=complex)
    accept = []
    for k in range(g.dim):
        off = k * size
        s_init[off + idx[g.initial]] = 1
        accept.append(off + m)
        for p in g.productions:
            i = idx[p.lhs]
            if not p.rhs:
                s_init[off + m] += p.amplitudes[k]
            elif len(p.rhs) == 1:
                mats[p.rhs[0]][off + i, off + m] += p.amplitudes[k]
            else:
                mats[p.rhs[0]][off + i, off + idx[p.rhs[1]]] += p.amplitudes[k]
    return Qfa(tuple(g.terminals), s_init, mats, OrthonormalBasis.standard(accept, n), generalized=True)


def qfa_to_regular_grammar(q: Qfa) -> QuantumGrammar:
    """Regular grammar with ``f_G = f_Q``.

    Variables ``I, v_0, ..., v_{n-1}``; ``c(I -> v_j) = s_j``,
    ``c(v_i -> a v_j) = (U_a)_{ij}`` and ``c_k(v_j -> ε) = conj(h_k[j])``, one
    amplitude coordinate per accept-basis vector ``h_k``.
    """
    names = _Names(set(q.alphabet))
    start = names.fresh("I")
    states = [names.fresh(f"v{j}") for j in range(q.dim)]
    basis = q.accept_basis.vectors
    dim = max(1, basis.shape[0])
    triples = []
    for j, v in enumerate(states):
        triples.append((start, (v,), q.s_init[j]))
        ends = np.zeros(dim, dtype=complex)
        ends[: basis.shape[0]] = basis[:, j].conj()
        triples.append((v, (), ends))
        for a in q.alphabet:
            u = q.transitions[a]
            for i, vj in enumerate(states):
                triples.append((v, (a, vj), u[j, i]))
    return QuantumGrammar([start, *states], q.alphabet, start, dim, triples)
