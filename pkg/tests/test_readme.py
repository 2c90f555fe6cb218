import re
from pathlib import Path

import pytest

from oracles import all_words, equal_counts
from qautomata import catalog
from qautomata.bilinear import eval_bilinear
from qautomata.io import dumps, loads

README = (Path(__file__).resolve().parent.parent / "README.md").read_text()
BLOCKS = re.findall(r"```json\n(.*?)```", README, re.S)


def test_one_example_per_type():
    types = sorted(loads(b).__class__.__name__ for b in BLOCKS)
    assert types == ["BilinearForm", "Dfa", "Qfa", "Qpda", "QuantumGrammar"]


def test_examples_match_catalog():
    docs = {type(o).__name__: o for o in map(loads, BLOCKS)}
    assert docs["Qfa"]("aa") == pytest.approx(0.75, abs=1e-12)
    assert eval_bilinear(docs["BilinearForm"], "aa") == pytest.approx(0.75, abs=1e-12)
    assert dumps(docs["Dfa"]) == dumps(catalog.bb_forbidden_dfa())
    assert dumps(docs["Qpda"]) == dumps(catalog.build_leq_qpda())
    assert dumps(docs["QuantumGrammar"]) == dumps(catalog.dyck_grammar())
    assert all(docs["Qpda"](w) == equal_counts(w) for w in all_words("ab", 6))
