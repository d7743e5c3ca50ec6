"""A zero test simulated by shuffling a block of counters back and forth.

The gadget moves every counter of the block into `c` and back, paying one
unit of `y` per step.  The budget runs out exactly when `c` was 0 and the
run went through the whole block, which is what makes it usable as a test.

Run: python3 demos/02_simtest.py
"""

from counterprog.gadgets import build_simtest
from counterprog.ir import Configuration, render, size
from counterprog.semantics import reach_set
from counterprog.verify import flip_inc, suite_simtest

prog = build_simtest("y", ["c", "b1"], "x", tested="c")
print(render(prog))
print("size", size(prog))

# the block holds K = 2, so a faithful run costs 2K = 4 from y and 2 from x
alpha = Configuration(b1=2, y=4, x=2)
for beta in reach_set(prog, alpha).configs:
    print(f"  {alpha} -> {beta}{'   <- exact' if beta == Configuration(b1=2) else ''}")

# with c nonzero, y never drains completely
alpha = Configuration(c=1, b1=1, y=4, x=2)
print("from", alpha, "exact final reachable:",
      any(b["y"] == 0 and b["x"] == 0 for b in reach_set(prog, alpha).configs))

print()
print(suite_simtest(3, 3).table())
print()
print("mutated gadget:", suite_simtest(2, 2, mutate=flip_inc).status)
