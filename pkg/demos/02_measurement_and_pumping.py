"""A unitary QFA, its closures, and the pumping constant."""
import itertools

import numpy as np

from qautomata import catalog
from qautomata.qfa import complement, find_pump, random_qfa, tensor, verify_pump, weighted_direct_sum
from qautomata.words import words_up_to

# a fixed state measured once; the letter does nothing
m = catalog.measurement_qfa()
print("f(a), f(aaa):", m("a"), m("aaa"))  # 3/4 both times
print("complement:", complement(m)("aa"))  # 1/4

# closures of unitary machines behave like products and mixtures
rng = np.random.default_rng(1)
q = random_qfa(3, ("a", "b"), rng)
r = random_qfa(2, ("a", "b"), rng)
w = "abba"
print(f"q(w) = {q(w):.6f}  r(w) = {r(w):.6f}")
print(f"tensor  = {tensor(q, r)(w):.6f}  (product {q(w) * r(w):.6f})")
mix = weighted_direct_sum(q, r, np.sqrt(0.3), np.sqrt(0.7))
print(f"mixture = {mix(w):.6f}  (0.3 q + 0.7 r = {0.3 * q(w) + 0.7 * r(w):.6f})")

# unitary letters are quasi-periodic: some power of U_w sits near the identity
eps = 0.05
k = find_pump(q, "ab", eps)
samples = list(itertools.product(list(words_up_to(q.alphabet, 3)), repeat=2))
print(f"pumping constant for ab at eps={eps}: k = {k}")
print("f(u (ab)^k v) within eps of f(uv) on all samples:", verify_pump(q, "ab", k, eps, samples))
