"""Lowering a checking program to a VASS and walking it independently.

Run: python3 demos/05_vass_export.py
"""

from counterprog.gadgets import build_ack
from counterprog.ir import Configuration, parse
from counterprog.semantics import ExplorationPolicy, reach_set
from counterprog.vass import VassSystem, export_vass, transition_counts, vass_reach

p = parse("loop { inc a; inc b }; choice { dec a } or { dec b }; test a")
v = export_vass(p)
print(v.to_text())

start = Configuration(b=1)
pol = ExplorationPolicy(sum_bound=4)
_, walked = vass_reach(VassSystem.from_text(v.to_text()), start, pol)
print("VASS walk :", walked)
print("program   :", reach_set(p, start, pol).configs)

A, _ = build_ack(1, 0)
cmd, eps = transition_counts(export_vass(A))
print(f"\nAck(1,0) lowers to {cmd} counter transitions and {eps} silent ones")
