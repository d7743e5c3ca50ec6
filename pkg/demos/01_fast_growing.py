"""Fast-growing functions, computed directly and by the rewrite system.

Run: python3 demos/01_fast_growing.py
"""

from counterprog.fastmath import BudgetExceeded, EvalFState, evalf_max, evalf_step, fg_f, fg_f_omega

print("F_1(n) = 2n+1 and F_2(n) = 2^(n+1)(n+1) - 1:")
for n in range(6):
    print(f"  n={n}  F_1={fg_f(1, n):<3} F_2={fg_f(2, n)}")

print("\nF_3(1) =", fg_f(3, 1))
print("F_w(0), F_w(1) =", fg_f_omega(0), fg_f_omega(1))
try:
    fg_f_omega(2)
except BudgetExceeded as e:
    print("F_w(2) is out of reach:", e)

# the rewrite system trades the vector for a larger n, step by step
s = EvalFState((0, 1), 1)
print("\nrewriting", s)
while any(s.v):
    s = evalf_step(s)
    print("  ->", s)
print("which is F_(0,1)(1) =", evalf_max(EvalFState((0, 1), 1)).n)
