"""QFAs and regular quantum grammars describe the same functions."""
import numpy as np

from qautomata.grammar import f_of_word, normalize_regular, qfa_to_regular_grammar, regular_to_qfa
from qautomata.qfa import random_qfa
from qautomata.words import words_up_to

q = random_qfa(2, ("a", "b"), np.random.default_rng(3), accept_dim=1)
g = qfa_to_regular_grammar(q)
print(f"grammar: {len(g.variables)} variables, {len(g.productions)} productions")

back = regular_to_qfa(normalize_regular(g))
print("machine dimension after the round trip:", back.dim)
worst = max(abs(back(w) - q(w)) + abs(f_of_word(g, w) - q(w)) for w in words_up_to(q.alphabet, 6))
print(f"largest disagreement on words up to length 6: {worst:.2e}")
