"""A unitary pushdown machine for equal numbers of a's and b's."""
from qautomata import catalog
from qautomata.grammar import f_of_word
from qautomata.qpda import (
    as_generalized,
    check_unitarity_truncated,
    expand_pop_lookahead,
    qpda_run,
    qpda_to_grammar,
    to_control_acceptance,
)

leq = catalog.build_leq_qpda()
print("controls:", leq.controls, " stack:", leq.stack_alphabet, " rules:", len(leq.rules))

# the stack counts the surplus letter; control remembers which one
state = qpda_run(leq, "aab")
for (control, stack), amp in state.items():
    print(f"after aab: control {control}, stack {''.join(stack)!r}, amplitude {amp}")

for w in ["", "ab", "ba", "aab", "abba", "aabbb"]:
    print(f"f({w!r}) = {leq(w)}")

# unitarity on every configuration whose image stays inside the truncation
print(check_unitarity_truncated(leq, 6))

# accept by control alone, via a marker under the bottom of the stack
ctrl = to_control_acceptance(leq)
print("control acceptance agrees:", all(ctrl(w) == leq(w) for w in ["abab", "aab", "bbaa"]))

# back to a context-free grammar: first drop the look-below on pops
g = qpda_to_grammar(expand_pop_lookahead(as_generalized(leq)))
print(f"grammar with {len(g.variables)} variables; f(abba) = {f_of_word(g, 'abba'):.12f}")
