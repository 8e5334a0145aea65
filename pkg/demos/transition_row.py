"""One step of the q-Gibbs dynamics from a small signature.

Prints the most likely successors of lambda = (1, 0) under a Bernoulli step and
checks the row sums to one.
"""
from qwalk.glaurent import AdmissibleFunction
from qwalk.schur import GeometricSpec
from qwalk.transitions import TransitionSpec, transition_row

ts = TransitionSpec(AdmissibleFunction.parse("bernoulli_up:1"), GeometricSpec(0.5, 2))
row = transition_row((1, 0), ts, tol=1e-12)
order = row.probs.argsort()[::-1]
for i in order[:6]:
    print(tuple(int(v) for v in row.mus[i]), f"{row.probs[i]:.6f}")
print("row mass", row.probs.sum())
