"""Reachability for counter programs.

Two independent engines:

* :func:`reach_set` compiles the program to a control-flow graph and runs a
  breadth-first search over ``(location, configuration)`` pairs.  This is
  the workhorse; it supports a sum bound (the K-bounded semantics), a per
  counter cap, a state budget and witness reconstruction.
* :func:`denotational_relation` computes the K-bounded relation of a program
  directly by structural recursion on boolean matrices indexed by the
  K-bounded configurations.  It is only meant as an oracle for small K.

Under a sum bound every visited configuration, including the source and the
target, must have a counter sum of at most K.  Successors violating a bound
are discarded before insertion, which matches the inductive definition
since every sub-relation is intersected with the bounded configurations.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .fastmath import BudgetExceeded
from .ir import (
    Choice,
    Configuration,
    Dec,
    Inc,
    Loop,
    Program,
    Repeat,
    Seq,
    Skip,
    Test,
    choice_items,
    counters,
    seq_items,
)

INC, DEC, TEST = 0, 1, 2
_KIND = {Inc: INC, Dec: DEC, Test: TEST}


class PolicyViolation(ValueError):
    """The source configuration itself violates the exploration bounds."""


@dataclass(frozen=True)
class ExplorationPolicy:
    sum_bound: Optional[int] = None
    per_counter_cap: Optional[int] = None
    max_states: int = 10**7
    max_depth: Optional[int] = None

    def admits(self, cfg: Configuration) -> bool:
        if self.sum_bound is not None and cfg.total() > self.sum_bound:
            return False
        if self.per_counter_cap is not None and any(
            v > self.per_counter_cap for v in cfg.values()
        ):
            return False
        return True


# -- control-flow graph ----------------------------------------------------------


@dataclass
class ControlFlowGraph:
    """Locations are ``0 .. n_locations-1``; ``cmd`` is ``None`` on epsilon edges.

    Shapes produced by :func:`compile_cfg`:

    * a command is a single edge ``entry -cmd-> exit``;
    * ``Loop(M)`` adds a junction ``j`` with ``entry -eps-> j``,
      ``j -eps-> exit`` and ``M`` compiled from ``j`` back to ``j``, so
      ``Loop(Inc(x))`` has 3 locations and a self-loop ``j -inc x-> j``;
    * ``Choice`` compiles both branches between the same two locations;
    * ``Seq`` threads a fresh middle location; ``Skip`` is an epsilon edge.
    """

    n_locations: int = 0
    entry: int = 0
    exit: int = 1
    edges: list = field(default_factory=list)

    def new_location(self) -> int:
        self.n_locations += 1
        return self.n_locations - 1

    def command_edges(self):
        return [e for e in self.edges if e[1] is not None]


def compile_cfg(p: Program) -> ControlFlowGraph:
    g = ControlFlowGraph()
    g.entry = g.new_location()
    g.exit = g.new_location()
    # explicit stack keeps deep Seq chains off the Python recursion limit
    stack = [(p, g.entry, g.exit)]
    while stack:
        node, src, dst = stack.pop()
        if isinstance(node, (Inc, Dec, Test)):
            g.edges.append((src, node, dst))
        elif isinstance(node, Skip):
            g.edges.append((src, None, dst))
        elif isinstance(node, Loop):
            j = g.new_location()
            g.edges.append((src, None, j))
            g.edges.append((j, None, dst))
            stack.append((node.body, j, j))
        elif isinstance(node, Seq):
            items = seq_items(node)
            locs = [src] + [g.new_location() for _ in items[:-1]] + [dst]
            for q, a, b in zip(items, locs, locs[1:]):
                stack.append((q, a, b))
        elif isinstance(node, Choice):
            for q in choice_items(node):
                stack.append((q, src, dst))
        elif isinstance(node, Repeat):
            if node.k == 0:
                g.edges.append((src, None, dst))
            else:
                locs = [src] + [g.new_location() for _ in range(node.k - 1)] + [dst]
                for a, b in zip(locs, locs[1:]):
                    stack.append((node.body, a, b))
        else:
            raise TypeError(f"not a program: {node!r}")
    return g


class _Compiled:
    """CFG with epsilon closures folded into the command edges."""

    def __init__(self, g: ControlFlowGraph, names: Sequence[str]):
        index = {c: i for i, c in enumerate(names)}
        eps = [[] for _ in range(g.n_locations)]
        out = [[] for _ in range(g.n_locations)]
        for a, cmd, b in g.edges:
            if cmd is None:
                eps[a].append(b)
            else:
                out[a].append((_KIND[type(cmd)], index[cmd.c], b, cmd))
        closure = []
        for loc in range(g.n_locations):
            seen = {loc}
            todo = [loc]
            while todo:
                u = todo.pop()
                for v in eps[u]:
                    if v not in seen:
                        seen.add(v)
                        todo.append(v)
            closure.append(seen)
        self.succ = [
            [e for u in sorted(closure[loc]) for e in out[u]] for loc in range(g.n_locations)
        ]
        self.accepting = [g.exit in closure[loc] for loc in range(g.n_locations)]
        self.entry = g.entry


# -- breadth-first reachability ------------------------------------------------------


@dataclass
class ReachResult:
    exhausted: bool
    configs: list
    witnesses: Optional[dict] = None

    def to_json_obj(self):
        obj = {
            "exhausted": self.exhausted,
            "configs": [c.to_json_obj() for c in self.configs],
        }
        if self.witnesses is not None:
            obj["witnesses"] = {
                c.to_json(): [render_command(cmd) for cmd in w]
                for c, w in sorted(self.witnesses.items())
            }
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)


def render_command(cmd) -> str:
    return f"{type(cmd).__name__.lower()} {cmd.c}"


def _sorted_configs(cfgs):
    return sorted(cfgs, key=Configuration.sort_key)


def _search(p: Program, start: Configuration, policy: ExplorationPolicy, want_witness: bool,
            target: Optional[Configuration] = None):
    if not policy.admits(start):
        raise PolicyViolation(f"source configuration {start!r} violates {policy}")
    names = tuple(sorted(set(counters(p)) | set(start)))
    cg = _Compiled(compile_cfg(p), names)
    target_vec = None
    if target is not None and not set(target) - set(names):
        target_vec = tuple(target[c] for c in names)
    first_final, parent, exhausted, found = _bfs(
        cg, tuple(start[c] for c in names), policy, want_witness, target_vec)
    return names, first_final, parent, exhausted, found


def _bfs(cg: "_Compiled", init_vec: tuple, policy: ExplorationPolicy, want_witness: bool,
         target_vec: Optional[tuple] = None):
    sb = policy.sum_bound
    cap = policy.per_counter_cap
    max_states = policy.max_states
    max_depth = policy.max_depth
    succ, accepting = cg.succ, cg.accepting

    init = (cg.entry, init_vec)
    parent = {init: None} if want_witness else None
    seen = {init}
    frontier = [init]
    first_final = {}
    truncated = False
    depth = 0

    while frontier:
        nxt = []
        for state in frontier:
            loc, vec = state
            if accepting[loc] and vec not in first_final:
                first_final[vec] = state
                if vec == target_vec:
                    return first_final, parent, not truncated, state
            if max_depth is not None and depth >= max_depth:
                if succ[loc]:
                    truncated = True
                continue
            s = sum(vec) if sb is not None else 0
            for kind, i, dst, cmd in succ[loc]:
                v = vec[i]
                if kind == INC:
                    if sb is not None and s >= sb:
                        continue
                    if cap is not None and v >= cap:
                        continue
                    nv = vec[:i] + (v + 1,) + vec[i + 1:]
                elif kind == DEC:
                    if v == 0:
                        continue
                    nv = vec[:i] + (v - 1,) + vec[i + 1:]
                else:
                    if v != 0:
                        continue
                    nv = vec
                child = (dst, nv)
                if child in seen:
                    continue
                if len(seen) >= max_states:
                    truncated = True
                    continue
                seen.add(child)
                if want_witness:
                    parent[child] = (state, cmd)
                nxt.append(child)
        frontier = nxt
        depth += 1
    return first_final, parent, not truncated, None


def _trace(parent, state):
    cmds = []
    while parent[state] is not None:
        state, cmd = parent[state]
        cmds.append(cmd)
    return cmds[::-1]


def reach_set(p: Program, start: Configuration = Configuration(),
              policy: ExplorationPolicy = ExplorationPolicy(), witnesses: bool = False) -> ReachResult:
    """All configurations reachable from ``start`` at the exit of ``p``.

    With ``witnesses=True`` each configuration maps to a shortest command
    sequence leading to it.
    """
    names, finals, parent, exhausted, _ = _search(p, Configuration(start), policy, witnesses)
    cfgs = {Configuration(dict(zip(names, vec))): state for vec, state in finals.items()}
    wit = None
    if witnesses:
        wit = {cfg: _trace(parent, state) for cfg, state in cfgs.items()}
    return ReachResult(exhausted, _sorted_configs(cfgs), wit)


@dataclass(frozen=True)
class Yes:
    witness: tuple


@dataclass(frozen=True)
class No:
    pass


@dataclass(frozen=True)
class Unknown:
    pass


def check_reach(p: Program, start: Configuration, target: Configuration,
                policy: ExplorationPolicy = ExplorationPolicy()):
    """``Yes(witness)``, ``No()`` (exhaustive search) or ``Unknown()`` (truncated)."""
    start, target = Configuration(start), Configuration(target)
    if not policy.admits(target):
        _, _, _, exhausted, _ = _search(p, start, policy, False)
        return No() if exhausted else Unknown()
    names, finals, parent, exhausted, found = _search(p, start, policy, True, target)
    if found is not None:
        return Yes(tuple(_trace(parent, found)))
    return No() if exhausted else Unknown()


def replay(start: Configuration, cmds) -> Optional[Configuration]:
    """Apply single commands in order; ``None`` if some command is blocked."""
    vals = dict(start)
    for cmd in cmds:
        v = vals.get(cmd.c, 0)
        if isinstance(cmd, Inc):
            vals[cmd.c] = v + 1
        elif isinstance(cmd, Dec):
            if v == 0:
                return None
            vals[cmd.c] = v - 1
        elif v != 0:
            return None
    return Configuration(vals)


# -- denotational oracle ---------------------------------------------------------------


def bounded_configurations(names: Sequence[str], K: int) -> list:
    """All configurations over ``names`` with counter sum at most ``K``."""
    out = []
    for vals in itertools.product(range(K + 1), repeat=len(names)):
        if sum(vals) <= K:
            out.append(Configuration(dict(zip(names, vals))))
    return _sorted_configs(out)


def denotational_relation(p: Program, K: int, names: Optional[Sequence[str]] = None,
                          max_states: int = 4096):
    """The K-bounded relation of ``p`` as a set of ``(alpha, beta)`` pairs.

    ``names`` (default: the counters of ``p``) fixes the configuration space.
    """
    names = tuple(sorted(names if names is not None else counters(p)))
    space = bounded_configurations(names, K) if _small(len(names), K, max_states) else None
    if space is None:
        raise BudgetExceeded(f"K-bounded space over {len(names)} counters exceeds {max_states}")
    index = {c: i for i, c in enumerate(space)}
    rel = _relation(p, space, index)
    pairs = np.argwhere(rel)
    return {(space[i], space[j]) for i, j in pairs}


def _small(n, K, limit):
    return math.comb(n + K, n) <= limit


def engine_relation(p: Program, K: int, names: Optional[Sequence[str]] = None) -> set:
    """The K-bounded relation computed by the search engine, one BFS per source.

    Same contract as :func:`denotational_relation`; the control-flow graph
    is compiled once and shared by all sources.
    """
    names = tuple(sorted(names if names is not None else counters(p)))
    missing = set(counters(p)) - set(names)
    if missing:
        raise ValueError(f"names must include every counter of the program: {sorted(missing)}")
    cg = _Compiled(compile_cfg(p), names)
    policy = ExplorationPolicy(sum_bound=K)
    out = set()
    for alpha in bounded_configurations(names, K):
        finals, _, _, _ = _bfs(cg, tuple(alpha[c] for c in names), policy, False)
        for vec in finals:
            out.add((alpha, Configuration(dict(zip(names, vec)))))
    return out


def _relation(p, space, index):
    n = len(space)
    if isinstance(p, Skip):
        return np.eye(n, dtype=bool)
    if isinstance(p, (Inc, Dec, Test)):
        m = np.zeros((n, n), dtype=bool)
        for i, a in enumerate(space):
            v = a[p.c]
            if isinstance(p, Inc):
                b = a.updated(**{p.c: v + 1})
            elif isinstance(p, Dec):
                if v == 0:
                    continue
                b = a.updated(**{p.c: v - 1})
            else:
                if v != 0:
                    continue
                b = a
            j = index.get(b)
            if j is not None:
                m[i, j] = True
        return m
    if isinstance(p, Loop):
        return _closure(_relation(p.body, space, index))
    if isinstance(p, Seq):
        return _compose(_relation(p.first, space, index), _relation(p.second, space, index))
    if isinstance(p, Choice):
        return _relation(p.left, space, index) | _relation(p.right, space, index)
    if isinstance(p, Repeat):
        out = np.eye(n, dtype=bool)
        body = _relation(p.body, space, index)
        for _ in range(p.k):
            out = _compose(out, body)
        return out
    raise TypeError(f"not a program: {p!r}")


def _compose(a, b):
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


def _closure(m):
    r = m | np.eye(m.shape[0], dtype=bool)
    while True:
        r2 = _compose(r, r)
        if (r2 == r).all():
            return r
        r = r2
