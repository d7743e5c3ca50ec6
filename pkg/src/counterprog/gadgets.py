"""Program constructors for the test-postponing reduction.

Every builder returns an ordinary :class:`~counterprog.ir.Program`, so the
gadgets can be rendered, measured and explored like any other program.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import fastmath
from .ir import (
    SKIP,
    Checking,
    Choice,
    Seq,
    choice_items,
    CounterId,
    Dec,
    General,
    Inc,
    Loop,
    Program,
    Repeat,
    Skip,
    Test,
    TestFree,
    choice,
    classify,
    counters,
    decs,
    incs,
    rename,
    seq,
    seq_items,
    tests,
)


class CounterClash(ValueError):
    """Counter arguments of a gadget overlap where they must be distinct."""


class NotAPreamplifierShape(ValueError):
    """The program given as preamplifier is not a checking program."""


MAX_REPEAT_EXPONENT = 40


def _seq(*parts: Program) -> Program:
    return seq(*(p for p in parts if not isinstance(p, Skip)))


# -- simtest -----------------------------------------------------------------------


def build_simtest(budget: CounterId, block: Sequence[CounterId], pair: CounterId,
                  tested: Optional[CounterId] = None) -> Program:
    """Test-free simulation of ``test`` on ``block[0]``.

    ``budget`` is decremented once per transfer step, ``pair`` twice at the
    end.  With ``tested`` given, the block is reordered as ``tested`` first
    and the remaining counters by name.
    """
    block = list(block)
    if tested is not None:
        if tested not in block:
            raise CounterClash(f"tested counter {tested!r} not in block")
        block = [tested] + sorted(c for c in block if c != tested)
    if not block:
        raise CounterClash("block must contain the tested counter")
    if len(set(block)) != len(block):
        raise CounterClash("block counters must be distinct")
    if budget == pair or budget in block or pair in block:
        raise CounterClash("budget and pair counters must be distinct and outside the block")
    d = len(block) - 1
    forward = [Loop(seq(Dec(block[i]), Inc(block[i - 1]), Dec(budget))) for i in range(1, d + 1)]
    backward = [Loop(seq(Dec(block[i - 1]), Inc(block[i]), Dec(budget))) for i in range(d, 0, -1)]
    return seq(*forward, *backward, Repeat(Dec(pair), 2))


# -- loop at most --------------------------------------------------------------------


def _split_prefix(body: Program, c: CounterId, cp: CounterId):
    items = [q for q in seq_items(body) if not isinstance(q, Skip)]
    allowed = ([], [Inc(c)], [Dec(cp)], [Dec(cp), Inc(c)])
    for prefix in sorted(allowed, key=len, reverse=True):
        if items[: len(prefix)] == prefix:
            rest = seq(*items[len(prefix):])
            if not set(counters(rest)) & {c, cp}:
                return prefix, rest
    raise CounterClash(f"loop-at-most body may not use {c!r} or {cp!r}")


def build_loop_at_most(c: CounterId, cp: CounterId, body: Program) -> Program:
    """``loop {dec c; inc cp}; loop {dec cp; inc c; body}``.

    ``body`` must not use ``c`` or ``cp`` except through one of the leading
    prefixes ``inc c``, ``dec cp`` or ``dec cp; inc c``.
    """
    if c == cp:
        raise CounterClash("loop-at-most needs two distinct counters")
    _split_prefix(body, c, cp)
    return seq(Loop(seq(Dec(c), Inc(cp))), Loop(_seq(Dec(cp), Inc(c), body)))


# -- evalF --------------------------------------------------------------------------


@dataclass(frozen=True)
class GoodConfigLayout:
    """Canonical counter names used by the evalF gadgets."""

    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("layout dimension must be positive")

    x = "x"
    xp = "xp"
    y = "y"
    b = "b"
    bp = "bp"
    c0p = "c0p"

    def xi(self, i: int) -> CounterId:
        if not 1 <= i <= self.d + 1:
            raise IndexError(i)
        return f"x{i}"

    def ci(self, i: int) -> CounterId:
        if not 0 <= i <= self.d:
            raise IndexError(i)
        return f"c{i}"

    @property
    def c0(self) -> CounterId:
        return "c0"

    def all_counters(self) -> tuple[CounterId, ...]:
        d = self.d
        return (
            self.x, self.xp, *(self.xi(i) for i in range(1, d + 2)), self.y, self.b, self.bp,
            self.c0, self.c0p, *(self.ci(i) for i in range(1, d + 1)),
        )

    def to_json_obj(self):
        return {"d": self.d, "counters": list(self.all_counters())}


def build_update_b(layout: GoodConfigLayout) -> Program:
    L = layout
    return seq(
        Inc(L.c0),
        build_loop_at_most(L.c0, L.c0p, seq(
            Dec(L.c0p), Inc(L.c0),
            build_loop_at_most(L.b, L.bp, Inc(L.b)),
        )),
        Dec(L.c0),
    )


def _evalf_branch(layout: GoodConfigLayout, p: int, drop=frozenset(), hardcoded_top=False,
                  verbatim=False):
    L, d = layout, layout.d
    xs = [L.xi(i) for i in range(1, d + 2)]

    def keep(cs):
        return [c for c in cs if c not in drop]

    def xinc(c):
        return SKIP if c in drop else Inc(c)

    dec_top = SKIP if hardcoded_top and p == d else Dec(L.ci(p))
    # For p = 1 the increment of c0 is delayed past the rounds loop: done up
    # front it lets that loop run one extra round, which halves x once too
    # often and yields non-conform configurations.
    late_c0 = p == 1 and not verbatim
    head = _seq(dec_top, SKIP if late_c0 else Inc(L.ci(p - 1)))
    transfer = Loop(_seq(decs(*keep(xs)), Inc(L.y)))
    restore = build_loop_at_most(L.x, L.xp, _seq(Dec(L.y), xinc(L.xi(p)), incs(*keep(xs))))
    inner = build_loop_at_most(L.b, L.bp, _seq(
        Dec(L.y), xinc(L.xi(p)), incs(*keep(xs[p - 1:]))))
    halve = build_loop_at_most(L.x, L.xp, seq(Dec(L.xp), inner))
    rounds = build_loop_at_most(L.c0, L.c0p, seq(Inc(L.ci(p - 1)), halve))
    update = build_update_b(layout) if p == 1 else SKIP
    return _seq(head, transfer, restore, rounds, Inc(L.c0) if late_c0 else SKIP, update)


def build_evalf_branch(layout: GoodConfigLayout, p: int, verbatim: bool = False) -> Program:
    """The branch of evalF that decrements ``c_p``.

    ``verbatim=True`` keeps ``inc c_{p-1}`` at the very start for ``p = 1``
    as well; that form is not conform-preserving and is kept for audits.
    """
    if not 1 <= p <= layout.d:
        raise IndexError(f"branch index {p} outside 1..{layout.d}")
    return _evalf_branch(layout, p, verbatim=verbatim)


def build_evalf(layout: GoodConfigLayout, verbatim: bool = False) -> Program:
    return choice(*(build_evalf_branch(layout, p, verbatim) for p in range(1, layout.d + 1)))


# -- preamplifiers ----------------------------------------------------------------------


@dataclass(frozen=True)
class PreamplifierSpec:
    """Distinguished triple, claimed constant and counter classification.

    ``K`` is ``None`` when the constant is too large to materialize;
    ``K_expr`` always describes it.
    """

    x: CounterId
    y: CounterId
    b: CounterId
    K: Optional[int]
    safe: tuple[CounterId, ...]
    unsafe: tuple[CounterId, ...]
    K_expr: str = ""

    def __post_init__(self):
        if len({self.x, self.y, self.b}) != 3:
            raise CounterClash("x, y, b must be pairwise distinct")
        if not {self.x, self.y, self.b} <= set(self.unsafe):
            raise CounterClash("x, y, b must be unsafe")
        if set(self.safe) & set(self.unsafe):
            raise CounterClash("safe and unsafe counters overlap")

    def to_json_obj(self):
        return {
            "x": self.x, "y": self.y, "b": self.b,
            "K": None if self.K is None else str(self.K),
            "K_expr": self.K_expr,
            "safe": list(self.safe), "unsafe": list(self.unsafe),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text) if isinstance(text, str) else text
        K = obj.get("K")
        return cls(obj["x"], obj["y"], obj["b"], None if K is None else int(K),
                   tuple(obj["safe"]), tuple(obj["unsafe"]), obj.get("K_expr", ""))


def _spec_for(program: Program, x, y, b, K, K_expr) -> PreamplifierSpec:
    cls = classify(program)
    tested = cls.tested if isinstance(cls, Checking) else ()
    unsafe = {x, y, b, *tested}
    used = set(counters(program))
    return PreamplifierSpec(x, y, b, K, tuple(sorted(used - unsafe)), tuple(sorted(unsafe)), K_expr)


def build_trivial_preamplifier(K: int):
    """``repeat K {inc b}; loop {inc x; repeat K {inc y}}``: exact by construction."""
    if K < 1:
        raise ValueError("K must be at least 1")
    prog = seq(Repeat(Inc("b"), K), Loop(seq(Inc("x"), Repeat(Inc("y"), K))))
    return prog, PreamplifierSpec("x", "y", "b", K, (), ("b", "x", "y"), str(K))


def _ack_constant(d: int, n: int):
    expr = f"2^F_{d + 1}({n})"
    try:
        e = fastmath.fg_f(d + 1, n)
        if e > fastmath._bit_budget(fastmath.DEFAULT_DIGIT_BUDGET):
            return None, expr
        return 2**e, expr
    except fastmath.BudgetExceeded:
        return None, expr


def _check_ack_args(d: int, n: int):
    if d < 1:
        raise ValueError("d must be at least 1")
    if n < 0:
        raise ValueError("n must be non-negative")
    if 2 * n + 1 > MAX_REPEAT_EXPONENT:
        raise fastmath.BudgetExceeded(f"repeat count 2^{2 * n + 1} too large")


def _ack_seed(L: GoodConfigLayout, n: int, drop=frozenset()) -> Program:
    d = L.d
    low = [L.xi(i) for i in range(1, d + 1) if L.xi(i) not in drop]
    return _seq(Inc(L.x), Repeat(incs(*low), 2**n) if low else SKIP,
                Repeat(Inc(L.xi(d + 1)), 2 ** (2 * n + 1)))


def _ack_tail(L: GoodConfigLayout, drop=frozenset()) -> Program:
    d = L.d
    drain = [L.xi(i) for i in range(1, d + 2) if L.xi(i) not in drop]
    tested = [L.xi(d + 1), L.bp, L.c0p] + [L.ci(i) for i in range(0, d + 1)]
    return seq(
        Loop(seq(Inc(L.y), decs(*drain))),
        Loop(Dec(L.c0)),
        tests(*(c for c in tested if c not in drop)),
    )


def build_ack(d: int, n: int):
    """Checking program claimed to be a ``2^F_{d+1}(n)``-preamplifier on 2d+8 counters.

    Besides the listed initial increments, ``b`` is seeded with ``2^n`` so
    that the seeded configuration is good (``b = 2^c0``).
    """
    _check_ack_args(d, n)
    L = GoodConfigLayout(d)
    prog = seq(
        Repeat(Inc(L.c0), n), Repeat(Inc(L.ci(d)), n + 1), Repeat(Inc(L.b), 2**n),
        _ack_seed(L, n),
        Loop(_ack_seed(L, n)),
        Loop(build_evalf(L)),
        _ack_tail(L),
    )
    K, expr = _ack_constant(d, n)
    return prog, _spec_for(prog, L.x, L.y, L.b, K, expr)


def build_ack_reduced(d: int, n: int):
    """2d+6-counter variant: ``c_d`` moves into the control structure, ``x_d`` is dropped.

    ``c_d`` starts at ``n + 1`` and is only ever decremented, by the branch
    ``p = d``; the evalF loop is unfolded into ``n + 2`` phases separated by
    that branch, and the final test on ``c_d`` becomes implicit.
    """
    _check_ack_args(d, n)
    L = GoodConfigLayout(d)
    drop = frozenset({L.xi(d), L.ci(d)})
    lower = [_evalf_branch(L, p, drop) for p in range(1, d)]
    phase = Loop(choice(*lower)) if lower else SKIP
    top = _evalf_branch(L, d, drop, hardcoded_top=True)
    steps = [phase]
    for _ in range(n + 1):
        steps += [top, phase]
    prog = _seq(
        Repeat(Inc(L.c0), n), Repeat(Inc(L.b), 2**n),
        _ack_seed(L, n, drop),
        Loop(_ack_seed(L, n, drop)),
        *steps,
        _ack_tail(L, drop),
    )
    K, expr = _ack_constant(d, n)
    return prog, _spec_for(prog, L.x, L.y, L.b, K, expr)


# -- composition ------------------------------------------------------------------------


def _fresh(name: str, taken: set) -> str:
    out = f"A::{name}"
    while out in taken:
        out = f"A::{out}"
    return out


def compose(A: Program, spec: PreamplifierSpec, M: Program) -> Program:
    """Checking program whose reachable configurations from 0 are those of
    ``M`` under the ``spec.K``-bounded semantics."""
    m_counters = list(counters(M))
    if not m_counters:
        return M
    cls = classify(A)
    if isinstance(cls, General):
        raise NotAPreamplifierShape("preamplifier must be a checking or test-free program")
    core, tested = (A, ()) if isinstance(cls, TestFree) else (cls.core, cls.tested)
    if spec.b in tested:
        # K = 0: any run needs b = 0 at the end
        core, tested = Loop(Inc(spec.x)), ()
        spec = PreamplifierSpec(spec.x, spec.y, spec.b, 0, (), (spec.x, spec.y, spec.b), "0")

    a_counters = set(counters(A)) | {spec.x, spec.y, spec.b}
    unsafe = sorted(a_counters - set(spec.safe))
    safe = sorted(c for c in spec.safe if c in a_counters)
    taken = set(m_counters) | a_counters
    mapping = {}
    for u in unsafe:
        if u in m_counters:
            mapping[u] = _fresh(u, taken)
            taken.add(mapping[u])
    for s, m in zip(safe, m_counters):
        mapping[s] = m
    for s in safe[len(m_counters):]:
        if s in m_counters:
            mapping[s] = _fresh(s, taken)
            taken.add(mapping[s])

    x, y, b = (mapping.get(c, c) for c in (spec.x, spec.y, spec.b))
    core = rename(core, mapping)
    tested = [mapping.get(c, c) for c in tested]
    block = sorted(set(m_counters) | {b})
    rewritten = _rewrite(seq(Test(m_counters[0]), M), x, y, b, block)
    return seq(core, rewritten, Loop(Dec(b)), tests(x, y, b, *tested))


def _rewrite(p: Program, x, y, b, block) -> Program:
    if isinstance(p, Inc):
        return seq(Inc(p.c), Dec(b))
    if isinstance(p, Dec):
        return seq(Dec(p.c), Inc(b))
    if isinstance(p, Test):
        return build_simtest(y, block, x, tested=p.c)
    if isinstance(p, Loop):
        return Loop(_rewrite(p.body, x, y, b, block))
    if isinstance(p, Repeat):
        return Repeat(_rewrite(p.body, x, y, b, block), p.k)
    if isinstance(p, Seq):
        return seq(*(_rewrite(q, x, y, b, block) for q in seq_items(p)))
    if isinstance(p, Choice):
        return choice(*(_rewrite(q, x, y, b, block) for q in choice_items(p)))
    return p
