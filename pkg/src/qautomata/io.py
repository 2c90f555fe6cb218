"""JSON interchange format for machines, grammars and bilinear forms.

Every document has a top-level ``"type"``. Complex numbers are ``[re, im]``
pairs (bare numbers are accepted on input). Names are strings; converted
machines use composite names, which serialize as nested lists. Errors carry
JSON-pointer paths to the offending field.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .bilinear import BilinearForm
from .errors import InvariantError, SchemaError
from .grammar import QuantumGrammar
from .linalg import OrthonormalBasis
from .qfa import Dfa, Qfa
from .qpda import ANY, PAD, Pop, Push, PushWord, Qpda, Rule, Stay

TYPES = ("qfa", "dfa", "grammar", "qpda", "bilinear")


# -- scalars -------------------------------------------------------------------

def _num(x: float):
    """Integral values print as integers; everything else keeps its exact float repr."""
    x = float(x)
    if x.is_integer() and abs(x) < 2**53 and math.copysign(1, x) > 0:
        return int(x)
    return x


def complex_to_json(c) -> list:
    c = complex(c)
    return [_num(c.real), _num(c.imag)]


def complex_from_json(x, path: str) -> complex:
    if isinstance(x, bool):
        raise SchemaError("expected a number or [re, im]", path)
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise SchemaError("expected a number or [re, im]", path)


def _vector(x, path) -> np.ndarray:
    if not isinstance(x, list):
        raise SchemaError("expected a list of complex numbers", path)
    return np.array([complex_from_json(v, f"{path}/{i}") for i, v in enumerate(x)], dtype=complex)


def _matrix(x, path) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise SchemaError("expected a non-empty list of rows", path)
    rows = [_vector(r, f"{path}/{i}") for i, r in enumerate(x)]
    if len({len(r) for r in rows}) != 1:
        raise SchemaError("rows have different lengths", path)
    return np.array(rows)


def _vec_json(v) -> list:
    return [complex_to_json(c) for c in np.asarray(v).ravel()]


def _mat_json(m) -> list:
    return [_vec_json(row) for row in np.asarray(m)]


def name_to_json(n):
    if isinstance(n, tuple):
        return [name_to_json(x) for x in n]
    if n is None or isinstance(n, (str, int, bool)):
        return n
    raise SchemaError(f"cannot serialize name {n!r}")


def name_from_json(x, path: str):
    if isinstance(x, list):
        return tuple(name_from_json(v, f"{path}/{i}") for i, v in enumerate(x))
    if isinstance(x, str) or (isinstance(x, int) and not isinstance(x, bool)) or x is None or isinstance(x, bool):
        return x
    raise SchemaError("expected a name (string or list of names)", path)


def _names(x, path) -> list:
    if not isinstance(x, list):
        raise SchemaError("expected a list", path)
    return [name_from_json(v, f"{path}/{i}") for i, v in enumerate(x)]


def _word(x, path) -> tuple:
    """Word over symbols: a list of names, or a string read one character per symbol."""
    if isinstance(x, str):
        return tuple(x)
    if isinstance(x, list):
        return tuple(name_from_json(v, f"{path}/{i}") for i, v in enumerate(x))
    raise SchemaError("expected a word (string or list of symbols)", path)


def _get(doc: dict, key: str, path: str, default=...):
    if key not in doc:
        if default is ...:
            raise SchemaError(f"missing field {key!r}", path)
        return default
    return doc[key]


def _bool(x, path) -> bool:
    if not isinstance(x, bool):
        raise SchemaError("expected true or false", path)
    return x


def _invariant(exc: InvariantError) -> SchemaError:
    field = exc.field or ""
    return SchemaError(f"invariant violated: {exc}", "/" + field if field else "")


# -- serialization -------------------------------------------------------------

def to_json(obj) -> dict:
    if isinstance(obj, Qfa):
        return {
            "type": "qfa",
            "alphabet": list(obj.alphabet),
            "s_init": _vec_json(obj.s_init),
            "transitions": {a: _mat_json(obj.transitions[a]) for a in obj.alphabet},
            "accept_basis": [_vec_json(h) for h in obj.accept_basis.vectors],
            "generalized": obj.generalized,
        }
    if isinstance(obj, Dfa):
        return {
            "type": "dfa",
            "states": list(obj.states),
            "alphabet": list(obj.alphabet),
            "init": obj.init,
            "accepting": [s for s in obj.states if s in obj.accepting],
            "delta": {s: {a: obj.delta[(s, a)] for a in obj.alphabet} for s in obj.states},
        }
    if isinstance(obj, QuantumGrammar):
        return {
            "type": "grammar",
            "variables": [name_to_json(v) for v in obj.variables],
            "terminals": list(obj.terminals),
            "initial": name_to_json(obj.initial),
            "dim": obj.dim,
            "productions": [
                {"lhs": name_to_json(p.lhs), "rhs": [name_to_json(s) for s in p.rhs], "amplitudes": _vec_json(p.amplitudes)}
                for p in obj.productions
            ],
        }
    if isinstance(obj, Qpda):
        return {
            "type": "qpda",
            "controls": [name_to_json(q) for q in obj.controls],
            "input_alphabet": list(obj.input_alphabet),
            "stack_alphabet": [name_to_json(t) for t in obj.stack_alphabet],
            "rules": [_rule_json(r) for r in obj.rules],
            "s_init": [
                {"control": name_to_json(q), "stack": [name_to_json(t) for t in s], "amplitude": complex_to_json(a)}
                for q, s, a in obj.s_init
            ],
            "accept_controls": [name_to_json(q) for q in obj.accept_controls],
            "acceptance_mode": obj.acceptance_mode,
            "unitary_claimed": obj.unitary_claimed,
            "pushes_words": obj.pushes_words,
        }
    if isinstance(obj, BilinearForm):
        return {
            "type": "bilinear",
            "kind": obj.kind,
            "pi": _vec_json(obj.pi),
            "matrices": {a: _mat_json(m) for a, m in obj.matrices.items()},
            "eta": _vec_json(obj.eta),
        }
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _rule_json(r: Rule) -> dict:
    act = r.action
    if isinstance(act, Push):
        action = {"push": name_to_json(act.symbol)}
    elif isinstance(act, PushWord):
        action = {"push_word": [name_to_json(t) for t in act.word]}
    elif isinstance(act, Pop):
        action = "pop"
    else:
        action = "stay"
    out = {
        "symbol": r.symbol,
        "from": name_to_json(r.from_control),
        "top": name_to_json(r.top),
        "action": action,
        "to": name_to_json(r.to_control),
        "amplitude": complex_to_json(r.amplitude),
    }
    if r.below is not ANY:
        out["below"] = name_to_json(r.below)
    return out


def dumps(obj, indent: int | None = 1) -> str:
    return json.dumps(to_json(obj), indent=indent, ensure_ascii=False)


# -- parsing -------------------------------------------------------------------

def from_json(doc):
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object", "")
    kind = doc.get("type")
    if kind not in TYPES:
        raise SchemaError(f"\"type\" must be one of {', '.join(TYPES)}", "/type")
    try:
        return {"qfa": _parse_qfa, "dfa": _parse_dfa, "grammar": _parse_grammar, "qpda": _parse_qpda, "bilinear": _parse_bilinear}[kind](doc)
    except InvariantError as exc:
        raise _invariant(exc) from exc


def _parse_qfa(doc):
    alphabet = _names(_get(doc, "alphabet", ""), "/alphabet")
    s = _vector(_get(doc, "s_init", ""), "/s_init")
    trans_doc = _get(doc, "transitions", "")
    if not isinstance(trans_doc, dict):
        raise SchemaError("expected an object keyed by symbol", "/transitions")
    trans = {a: _matrix(m, f"/transitions/{a}") for a, m in trans_doc.items()}
    basis_doc = _get(doc, "accept_basis", "")
    if not isinstance(basis_doc, list):
        raise SchemaError("expected a list of vectors", "/accept_basis")
    vecs = [_vector(h, f"/accept_basis/{i}") for i, h in enumerate(basis_doc)]
    if any(v.shape[0] != s.shape[0] for v in vecs):
        raise SchemaError("accept vectors must match the state dimension", "/accept_basis")
    try:
        basis = OrthonormalBasis(np.array(vecs).reshape(len(vecs), s.shape[0]), s.shape[0])
    except InvariantError as exc:
        raise SchemaError(f"invariant violated: {exc}", "/accept_basis") from exc
    generalized = _bool(_get(doc, "generalized", "", False), "/generalized")
    return Qfa(tuple(alphabet), s, trans, basis, generalized)


def _parse_dfa(doc):
    states = _names(_get(doc, "states", ""), "/states")
    alphabet = _names(_get(doc, "alphabet", ""), "/alphabet")
    delta_doc = _get(doc, "delta", "")
    if not isinstance(delta_doc, dict):
        raise SchemaError("expected an object keyed by state", "/delta")
    delta = {}
    for s, row in delta_doc.items():
        if not isinstance(row, dict):
            raise SchemaError("expected an object keyed by symbol", f"/delta/{s}")
        for a, t in row.items():
            delta[(s, a)] = name_from_json(t, f"/delta/{s}/{a}")
    accepting = _names(_get(doc, "accepting", ""), "/accepting")
    return Dfa(tuple(states), tuple(alphabet), delta, name_from_json(_get(doc, "init", ""), "/init"), frozenset(accepting))


def _parse_grammar(doc):
    variables = _names(_get(doc, "variables", ""), "/variables")
    terminals = _names(_get(doc, "terminals", ""), "/terminals")
    dim = _get(doc, "dim", "", 1)
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise SchemaError("expected an integer", "/dim")
    prods_doc = _get(doc, "productions", "")
    if not isinstance(prods_doc, list):
        raise SchemaError("expected a list", "/productions")
    seen = set()
    triples = []
    for i, p in enumerate(prods_doc):
        path = f"/productions/{i}"
        if not isinstance(p, dict):
            raise SchemaError("expected an object", path)
        lhs = name_from_json(_get(p, "lhs", path), f"{path}/lhs")
        rhs = _word(_get(p, "rhs", path), f"{path}/rhs")
        amps_doc = _get(p, "amplitudes", path)
        if isinstance(amps_doc, (int, float)) and not isinstance(amps_doc, bool):
            amps = np.full(dim, complex(amps_doc))
        else:
            amps = _vector(amps_doc, f"{path}/amplitudes")
        if amps.shape[0] != dim:
            raise SchemaError(f"expected {dim} amplitudes", f"{path}/amplitudes")
        if (lhs, rhs) in seen:
            raise SchemaError("duplicate production", path)
        seen.add((lhs, rhs))
        triples.append((lhs, rhs, amps))
    initial = name_from_json(_get(doc, "initial", ""), "/initial")
    return QuantumGrammar(variables, terminals, initial, dim, triples)


def _action(x, path):
    if x == "pop":
        return Pop()
    if x == "stay":
        return Stay()
    if isinstance(x, dict) and len(x) == 1:
        if "push" in x:
            return Push(name_from_json(x["push"], f"{path}/push"))
        if "push_word" in x:
            return PushWord(_word(x["push_word"], f"{path}/push_word"))
    raise SchemaError('expected "pop", "stay", {"push": t} or {"push_word": w}', path)


def _parse_qpda(doc):
    stack_alphabet = _names(_get(doc, "stack_alphabet", ""), "/stack_alphabet")
    if PAD in stack_alphabet:
        raise SchemaError(f"stack symbol {PAD!r} is reserved", f"/stack_alphabet/{stack_alphabet.index(PAD)}")
    rules = []
    rules_doc = _get(doc, "rules", "")
    if not isinstance(rules_doc, list):
        raise SchemaError("expected a list", "/rules")
    for i, r in enumerate(rules_doc):
        path = f"/rules/{i}"
        if not isinstance(r, dict):
            raise SchemaError("expected an object", path)
        below = name_from_json(r["below"], f"{path}/below") if "below" in r else ANY
        rules.append(
            Rule(
                symbol=name_from_json(_get(r, "symbol", path), f"{path}/symbol"),
                from_control=name_from_json(_get(r, "from", path), f"{path}/from"),
                top=name_from_json(_get(r, "top", path), f"{path}/top"),
                action=_action(_get(r, "action", path), f"{path}/action"),
                to_control=name_from_json(_get(r, "to", path), f"{path}/to"),
                amplitude=complex_from_json(_get(r, "amplitude", path, 1), f"{path}/amplitude"),
                below=below,
            )
        )
    s_init = []
    init_doc = _get(doc, "s_init", "")
    if not isinstance(init_doc, list):
        raise SchemaError("expected a list", "/s_init")
    for i, e in enumerate(init_doc):
        path = f"/s_init/{i}"
        if not isinstance(e, dict):
            raise SchemaError("expected an object", path)
        s_init.append(
            (
                name_from_json(_get(e, "control", path), f"{path}/control"),
                _word(_get(e, "stack", path, []), f"{path}/stack"),
                complex_from_json(_get(e, "amplitude", path, 1), f"{path}/amplitude"),
            )
        )
    return Qpda(
        controls=_names(_get(doc, "controls", ""), "/controls"),
        input_alphabet=_names(_get(doc, "input_alphabet", ""), "/input_alphabet"),
        stack_alphabet=stack_alphabet,
        rules=rules,
        s_init=s_init,
        accept_controls=_names(_get(doc, "accept_controls", ""), "/accept_controls"),
        acceptance_mode=_get(doc, "acceptance_mode", "", "empty_stack_and_control"),
        unitary_claimed=_bool(_get(doc, "unitary_claimed", "", False), "/unitary_claimed"),
        pushes_words=_bool(_get(doc, "pushes_words", "", False), "/pushes_words"),
    )


def _parse_bilinear(doc):
    mats_doc = _get(doc, "matrices", "")
    if not isinstance(mats_doc, dict):
        raise SchemaError("expected an object keyed by symbol", "/matrices")
    return BilinearForm(
        pi=_vector(_get(doc, "pi", ""), "/pi"),
        matrices={a: _matrix(m, f"/matrices/{a}") for a, m in mats_doc.items()},
        eta=_vector(_get(doc, "eta", ""), "/eta"),
        kind=_get(doc, "kind", "", "complex"),
    )


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})", "") from exc
    return from_json(doc)


def parse_machine(source):
    """Parse a path or a JSON text into a Qfa, Dfa, QuantumGrammar, Qpda or BilinearForm."""
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise SchemaError(f"cannot read {source}: {exc.strerror}", "") from exc
        return loads(text)
    return loads(source)


def save(obj, path) -> None:
    Path(path).write_text(dumps(obj) + "\n", encoding="utf-8")


__all__ = [
    "complex_from_json",
    "complex_to_json",
    "dumps",
    "from_json",
    "loads",
    "parse_machine",
    "save",
    "to_json",
]
