"""Postponing the tests of a program to its very end.

`compose` rewrites every test of M into a simtest paid for by a
preamplifier, so the result only tests counters once, at the end.  Its
finals over M's counters are exactly what M reaches while every visited
configuration stays within sum K.

Run: python3 demos/04_compose.py
"""

from counterprog.gadgets import build_trivial_preamplifier, compose
from counterprog.ir import ZERO, classify, parse, size
from counterprog.semantics import ExplorationPolicy, reach_set
from counterprog.verify import suite_compose

M = parse("loop { inc a }; loop { dec a; inc b }; test a")
K = 2
A, spec = build_trivial_preamplifier(K)
N = compose(A, spec, M)
print("M: size", size(M), type(classify(M)).__name__)
print("A |> M: size", size(N), type(classify(N)).__name__, "with tested", classify(N).tested)

want = reach_set(M, ZERO, ExplorationPolicy(sum_bound=K)).configs
got = [b for b in reach_set(N, ZERO, ExplorationPolicy(sum_bound=22)).configs if set(b) <= {"a", "b"}]
print("M under sum bound", K, ":", want)
print("A |> M finals      :", got)
print(suite_compose(M, K, A, spec).table())
