"""A quantum grammar for balanced brackets: normal forms and length series."""
import numpy as np

from qautomata import catalog
from qautomata.grammar import (
    derive_amplitudes,
    eliminate_epsilon,
    eliminate_unit_productions,
    f_of_word,
    grammar_forms,
    to_chomsky,
    to_greibach,
)
from qautomata.series import grammar_amplitude_series, quantum_language_coefficients

g = catalog.dyck_grammar()  # I -> a I b I | eps, amplitude 1
for p in g.productions:
    print(p)
print("forms:", sorted(grammar_forms(g)))

for w in ["", "ab", "aabb", "abab", "abba"]:
    print(f"f({w!r}) = {f_of_word(g, w)}")

# the same amplitudes survive both normal forms
gnf = to_greibach(g)
cnf = to_chomsky(eliminate_unit_productions(eliminate_epsilon(g)))
print("greibach productions:", len(gnf.productions), " chomsky productions:", len(cnf.productions))
print("aabbab:", derive_amplitudes(gnf, "aabbab"), derive_amplitudes(cnf, "aabbab"))

# amplitude series of the initial variable, by fixpoint iteration
series = grammar_amplitude_series(g, 0, 8).real()
print("amplitude series:", np.rint(series).astype(int).tolist())  # Catalan numbers on even degrees

# f-series by brute-force enumeration agrees
f_series = quantum_language_coefficients(lambda w: f_of_word(g, w), g.terminals, 8).real()
print("f series:        ", np.rint(f_series).astype(int).tolist())
