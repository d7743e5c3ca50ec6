"""Lowering of test-free and checking programs to vector addition systems with states.

Text format, one item per line::

    state q0
    init q0
    final q1
    zerofinal c1,c2
    trans q0 q1 x:+1
    trans q1 q0

A ``trans`` line carries at most one delta; a bare ``trans FROM TO`` is an
epsilon move.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .ir import Configuration, Dec, General, Inc, Program, TestFree, classify
from .semantics import ExplorationPolicy, compile_cfg


class HasInteriorTests(ValueError):
    """The program tests a counter before its final block of tests."""


class VassFormatError(ValueError):
    pass


@dataclass
class VassSystem:
    states: list = field(default_factory=list)
    initial: str = ""
    final: str = ""
    transitions: list = field(default_factory=list)  # (src, dst, {counter: delta})
    zero_finals: list = field(default_factory=list)

    def counters(self) -> list:
        cs = {c for _, _, eff in self.transitions for c in eff} | set(self.zero_finals)
        return sorted(cs)

    def to_text(self) -> str:
        lines = [f"state {s}" for s in self.states]
        lines += [f"init {self.initial}", f"final {self.final}"]
        if self.zero_finals:
            lines.append("zerofinal " + ",".join(self.zero_finals))
        for a, b, eff in self.transitions:
            deltas = " ".join(f"{c}:{d:+d}" for c, d in sorted(eff.items()))
            lines.append(f"trans {a} {b} {deltas}".rstrip())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "VassSystem":
        v = cls()
        delta_re = re.compile(r"(\S+):([+-]\d+)\Z")
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, *rest = line.split()
            if head == "state" and len(rest) == 1:
                v.states.append(rest[0])
            elif head in ("init", "final") and len(rest) == 1:
                setattr(v, "initial" if head == "init" else "final", rest[0])
            elif head == "zerofinal" and len(rest) == 1:
                v.zero_finals = rest[0].split(",")
            elif head == "trans" and len(rest) in (2, 3):
                eff = {}
                if len(rest) == 3:
                    m = delta_re.match(rest[2])
                    if not m:
                        raise VassFormatError(f"line {lineno}: bad delta {rest[2]!r}")
                    eff[m.group(1)] = int(m.group(2))
                v.transitions.append((rest[0], rest[1], eff))
            else:
                raise VassFormatError(f"line {lineno}: cannot parse {raw!r}")
        known = set(v.states)
        for s in [v.initial, v.final] + [t[0] for t in v.transitions] + [t[1] for t in v.transitions]:
            if s not in known:
                raise VassFormatError(f"undeclared state {s!r}")
        return v


def export_vass(p: Program) -> VassSystem:
    cls = classify(p)
    if isinstance(cls, General):
        raise HasInteriorTests("only test-free and checking programs lower to a VASS")
    core, tested = (p, ()) if isinstance(cls, TestFree) else (cls.core, cls.tested)
    g = compile_cfg(core)
    name = [f"q{i}" for i in range(g.n_locations)]
    trans = []
    for a, cmd, b in g.edges:
        if cmd is None:
            eff = {}
        elif isinstance(cmd, Inc):
            eff = {cmd.c: 1}
        elif isinstance(cmd, Dec):
            eff = {cmd.c: -1}
        else:
            raise AssertionError("test inside a test-free core")
        trans.append((name[a], name[b], eff))
    zero = list(dict.fromkeys(tested))
    return VassSystem(name, name[g.entry], name[g.exit], trans, zero)


def vass_reach(v: VassSystem, start: Configuration,
               policy: ExplorationPolicy = ExplorationPolicy()) -> tuple[bool, list]:
    """Final configurations of ``v`` from ``start``; returns ``(exhausted, configs)``.

    A plain BFS over ``(state, vector)``: every visited vector must satisfy
    the policy bounds, and runs are accepted at ``final`` when all
    ``zero_finals`` counters are 0.
    """
    names = sorted(set(v.counters()) | set(start))
    idx = {c: i for i, c in enumerate(names)}
    out_edges: dict = {}
    for a, b, eff in v.transitions:
        out_edges.setdefault(a, []).append((b, [(idx[c], d) for c, d in eff.items()]))
    zf = [idx[c] for c in v.zero_finals]
    init = (v.initial, tuple(start.get(c, 0) for c in names))
    seen = {init}
    todo = [init]
    finals = set()
    exhausted = True
    while todo:
        state, vec = todo.pop()
        if state == v.final and all(vec[i] == 0 for i in zf):
            finals.add(vec)
        for dst, eff in out_edges.get(state, ()):
            nv = list(vec)
            for i, d in eff:
                nv[i] += d
            if min(nv, default=0) < 0:
                continue
            cfg = Configuration(dict(zip(names, nv)))
            if not policy.admits(cfg):
                continue
            nxt = (dst, tuple(nv))
            if nxt in seen:
                continue
            if len(seen) >= policy.max_states:
                exhausted = False
                continue
            seen.add(nxt)
            todo.append(nxt)
    cfgs = sorted((Configuration(dict(zip(names, vec))) for vec in finals), key=Configuration.sort_key)
    return exhausted, cfgs


def transition_counts(v: VassSystem) -> tuple[int, int]:
    """``(command transitions, epsilon transitions)``."""
    cmd = sum(1 for _, _, eff in v.transitions if eff)
    return cmd, len(v.transitions) - cmd
