"""Interference of grammars: a symmetric difference and a three-way sum."""
import numpy as np

from qautomata import catalog
from qautomata.grammar import f_of_word, symmetric_difference, three_way_interference

g1 = catalog.equal_ab_then_c()   # a^n b^n c^*
g2 = catalog.equal_bc_after_a()  # a^* b^n c^n
g = symmetric_difference(g1, g2)

# amplitudes +1 and -1 cancel exactly on the intersection a^n b^n c^n
for w in ["aabbc", "abcc", "abc", "aabbcc", "ab", ""]:
    print(f"{w!r:10} g1={f_of_word(g1, w):.0f} g2={f_of_word(g2, w):.0f} diff={f_of_word(g, w):.0f}")

# three grammars with weights 1, w, w^2 (w a cube root of unity):
# f is 1 on words in one or two of the languages and 0 on all three
g3 = catalog.equal_ac_around_b()
t = three_way_interference(g1, g2, g3)
for w in ["abc", "aabbc", "aabbcc", "abbc"]:
    m = sum(f_of_word(x, w) for x in (g1, g2, g3))
    print(f"{w!r:10} in {m:.0f} of 3 languages -> f = {f_of_word(t, w):.3f}")

# a small finite case with every multiplicity present
h = catalog.small_triple_interference()
for w in ["a", "ab", "ba", "bb", "b", "aa"]:
    print(f"{w!r:5} f = {np.round(f_of_word(h, w), 12)}")
