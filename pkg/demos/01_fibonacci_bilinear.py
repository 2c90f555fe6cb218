"""Counting words of a regular language through its bilinear form."""
import numpy as np

from qautomata import catalog
from qautomata.bilinear import eval_bilinear, to_bilinear, to_real
from qautomata.qfa import embed_dfa
from qautomata.series import qfa_length_coefficients

# words over {a, b} with no two consecutive b's
dfa = catalog.bb_forbidden_dfa()
q = embed_dfa(dfa)  # 0/1 matrices, so f is the characteristic function
print("f(abab) =", q("abab"), " f(abba) =", q("abba"))

# lift to pi, M_a, eta: f(w) = pi . M_w . eta is linear in the lifted state
b = to_bilinear(q)
print("lifted dimension:", b.dim)
print("bilinear f(abab) =", eval_bilinear(b, "abab"))

# the same form over the reals (each complex entry becomes a 2x2 block)
r = to_real(b)
print("real form dimension:", r.dim, " f(abab) =", eval_bilinear(r, "abab"))

# sum_{|w|=n} f(w) is pi (M_a + M_b)^n eta, one matrix power per degree
coeffs = qfa_length_coefficients(q, 12).real()
print("coefficients:", np.rint(coeffs).astype(int).tolist())  # 1 2 3 5 8 13 ...
