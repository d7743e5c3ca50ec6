"""Checking the Ack(1,0) preamplifier and its 8-counter reduction.

A K-preamplifier ends with y >= b*x, and y = b*x forces b = K.  The
reduced variant drops a counter; at d = 1 that removes the last link
between x and the counter chain, and the check below finds finals that
violate y >= b*x.

Run: python3 demos/03_preamplifier.py
"""

from counterprog.gadgets import build_ack, build_ack_reduced
from counterprog.ir import ZERO, dimension, size
from counterprog.semantics import ExplorationPolicy, reach_set
from counterprog.verify import check_preamplifier

policy = ExplorationPolicy(sum_bound=16)
for build in (build_ack, build_ack_reduced):
    A, spec = build(1, 0)
    print(f"{build.__name__}(1, 0): {dimension(A)} counters, size {size(A)}, K = {spec.K_expr} = {spec.K}")
    finals = reach_set(A, ZERO, policy).configs
    print("  finals:", ", ".join(map(str, finals[:6])), "..." if len(finals) > 6 else "")
    r = check_preamplifier(A, spec, 2, policy)
    print("  check:", r.status)
    for _, expected, got in r.failures[:3]:
        print("    ", got, "violates", expected)
