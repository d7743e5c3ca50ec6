"""Exhaustive desk-scale checkers for the gadgets.

Every suite returns a :class:`SuiteReport`.  A suite whose underlying search
was truncated reports ``inconclusive`` instead of ``pass``, so a small state
budget can never pass for a proof.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .conform import (
    BAD,
    GOOD,
    NONCONFORM,
    ConformReport,
    LayoutViolation,
    applicable_classes,
    classify_conform,
    good_config,
)
from .fastmath import EvalFState, ZeroVector, evalf_step
from .gadgets import (
    GoodConfigLayout,
    PreamplifierSpec,
    build_evalf,
    build_loop_at_most,
    build_simtest,
    build_update_b,
    compose,
)
from .ir import (
    ZERO,
    Choice,
    Configuration,
    Dec,
    Inc,
    Loop,
    Program,
    Repeat,
    Seq,
    counters,
    seq,
)
from .semantics import ExplorationPolicy, reach_set

__all__ = [
    "BAD", "GOOD", "NONCONFORM", "ConformReport", "LayoutViolation", "SuiteReport",
    "applicable_classes", "check_preamplifier", "classify_conform", "flip_inc",
    "good_config", "suite_compose", "suite_evalf", "suite_loop_at_most",
    "suite_simtest", "suite_update_b", "DEFAULT_EVALF_CASES",
]

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
EXIT_CODES = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}

# failures beyond this many are counted but not stored
MAX_RECORDED_FAILURES = 50


def _plain(value):
    """JSON-friendly rendering of suite inputs and outcomes."""
    if isinstance(value, Configuration):
        return value.to_json_obj()
    if isinstance(value, Program):
        return str(value)
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [_plain(v) for v in value]
        return sorted(items, key=repr) if isinstance(value, (set, frozenset)) else items
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, int) and not isinstance(value, bool) and value.bit_length() > 53:
        return str(value)
    return value


@dataclass
class SuiteReport:
    name: str
    cases_run: int = 0
    failures: list = field(default_factory=list)
    truncated: bool = False
    elapsed: float = 0.0
    notes: list = field(default_factory=list)
    failure_count: int = 0

    @property
    def status(self) -> str:
        if self.failure_count:
            return FAIL
        return INCONCLUSIVE if self.truncated else PASS

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def fail(self, case, expected, got):
        self.failure_count += 1
        if len(self.failures) < MAX_RECORDED_FAILURES:
            self.failures.append((case, expected, got))

    def to_json_obj(self, timing: bool = False):
        obj = {
            "suite": self.name,
            "status": self.status,
            "cases_run": self.cases_run,
            "failure_count": self.failure_count,
            "failures": [
                {"input": _plain(c), "expected": _plain(e), "got": _plain(g)}
                for c, e, g in self.failures
            ],
            "truncated": self.truncated,
            "notes": list(self.notes),
        }
        if timing:
            obj["elapsed_s"] = round(self.elapsed, 3)
        return obj

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_json_obj(timing), sort_keys=True)

    def table(self) -> str:
        rows = [
            ("suite", self.name),
            ("status", self.status),
            ("cases", str(self.cases_run)),
            ("failures", str(self.failure_count)),
            ("elapsed", f"{self.elapsed:.2f}s"),
        ]
        w = max(len(k) for k, _ in rows)
        lines = [f"{k.ljust(w)}  {v}" for k, v in rows]
        for c, e, g in self.failures[:10]:
            lines.append(f"  FAIL {_plain(c)}: expected {_plain(e)}, got {_plain(g)}")
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


class _Timer:
    def __init__(self, report: SuiteReport):
        self.report = report

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.elapsed = time.perf_counter() - self.t0
        return False


def _grid(names: Sequence[str], hi: int) -> Iterable[Configuration]:
    for vals in itertools.product(range(hi + 1), repeat=len(names)):
        yield Configuration(dict(zip(names, vals)))


# -- preamplifiers ----------------------------------------------------------------


def check_preamplifier(A: Program, spec: PreamplifierSpec, l_max: int,
                       policy: ExplorationPolicy = ExplorationPolicy(sum_bound=16)) -> SuiteReport:
    """Check the three preamplifier clauses on the finals reachable from 0.

    Clauses (i) and (ii) are universal, so violations found in a truncated
    search are still real failures; clause (iii) needs ``y = b x`` finals
    with ``x = 1..l_max`` and the sum bound must leave room for them.
    """
    if spec.K is None:
        raise ValueError(f"K = {spec.K_expr} is too large to check")
    rep = SuiteReport(f"preamp[K={spec.K}]")
    with _Timer(rep):
        res = reach_set(A, ZERO, policy)
        rep.truncated = not res.exhausted
        x, y, b = spec.x, spec.y, spec.b
        tight_x = set()
        for beta in res.configs:
            rep.cases_run += 1
            stray = {c: v for c, v in beta.items() if c not in (x, y, b)}
            if beta[y] < beta[b] * beta[x] or stray:
                rep.fail(beta, "y >= b*x and zero outside {x,y,b}", beta)
            if beta[y] == beta[b] * beta[x]:
                if beta[b] != spec.K:
                    rep.fail(beta, f"b = {spec.K} whenever y = b*x", f"b = {beta[b]}")
                elif not stray:
                    tight_x.add(beta[x])
        for ell in range(1, l_max + 1):
            rep.cases_run += 1
            if ell not in tight_x:
                rep.fail({"l": ell}, "a final with y = b*x and x = l", "none within bound")
    return rep


# -- simtest ----------------------------------------------------------------------


def flip_inc(p: Program, which: int = 0) -> Program:
    """Mutation helper: turn the ``which``-th increment (preorder) into a decrement."""
    seen = [0]

    def go(q):
        if isinstance(q, Inc):
            hit = seen[0] == which
            seen[0] += 1
            return Dec(q.c) if hit else q
        return _map_children(q, go)

    return go(p)


def _map_children(q: Program, f) -> Program:
    if isinstance(q, Loop):
        return Loop(f(q.body))
    if isinstance(q, Seq):
        return Seq(f(q.first), f(q.second))
    if isinstance(q, Choice):
        return Choice(f(q.left), f(q.right))
    if isinstance(q, Repeat):
        return Repeat(f(q.body), q.k)
    return q


def suite_simtest(max_b: int, max_val: int,
                  mutate: Optional[Callable[[Program], Program]] = None) -> SuiteReport:
    """Both directions of the simtest guarantees over every block size and tested counter.

    ``budget = y`` pays one unit per transfer step and ``pair = x`` two units
    in total, so a faithful run ends exactly at ``test c; dec y^2K; dec x^2``.
    """
    if max_b > 3 or max_val > 4:
        raise ValueError("suite_simtest is limited to max_b <= 3 and max_val <= 4")
    rep = SuiteReport(f"simtest[maxB={max_b},maxVal={max_val}]")
    with _Timer(rep):
        for m in range(1, max_b + 1):
            block = [f"b{i}" for i in range(m)]
            names = block + ["x", "y"]
            for tested in block:
                prog = build_simtest("y", block, "x", tested=tested)
                if mutate is not None:
                    prog = mutate(prog)
                for alpha in _grid(names, max_val):
                    rep.cases_run += 1
                    _simtest_case(rep, prog, block, tested, alpha)
    return rep


def _simtest_case(rep, prog, block, tested, alpha):
    K = sum(alpha[c] for c in block)
    res = reach_set(prog, alpha)
    rep.truncated |= not res.exhausted
    finals = set(res.configs)
    case = {"B": block, "c": tested, "alpha": alpha}
    exact = None
    if alpha["x"] >= 2 and alpha["y"] >= 2 * K:
        exact = alpha.updated(x=alpha["x"] - 2, y=alpha["y"] - 2 * K)
    if alpha[tested] == 0 and exact is not None and exact not in finals:
        rep.fail(case, exact, "not reachable")
    above = alpha["y"] >= K * alpha["x"]
    for beta in finals:
        if sum(beta[c] for c in block) != K:
            rep.fail(case, f"sum over B = {K}", beta)
        if above and beta["y"] < K * beta["x"]:
            rep.fail(case, "y >= K*x preserved", beta)
        if above and beta["y"] == K * beta["x"]:
            ok = alpha["y"] == K * alpha["x"] and alpha[tested] == 0 and beta == exact
            if not ok:
                rep.fail(case, "y = K*x only after an exact test", beta)


# -- loop at most -----------------------------------------------------------------


def _lam_body(variant: int, c, cp, m: Program) -> Program:
    return {
        1: m,
        2: seq(Inc(c), m),
        3: seq(Dec(cp), m),
        4: seq(Dec(cp), Inc(c), m),
    }[variant]


def _lam_expected(variant: int, c0: int, cp0: int) -> set:
    """Closed-form (z, c, c') outcomes from the (n, l) characterization."""
    out = set()
    for n in range(c0 + 1):
        avail = n + cp0
        top = avail if variant in (1, 2) else avail // 2
        for ell in range(top + 1):
            gain = 2 * ell if variant in (2, 4) else ell
            spend = 2 * ell if variant in (3, 4) else ell
            out.add((ell, c0 - n + gain, avail - spend))
    return out


def suite_loop_at_most(variant: int, max_c: int) -> SuiteReport:
    """Reachable ``(z, c, c')`` from every ``alpha`` with ``c + c' <= max_c``.

    The body is instrumented with ``inc z`` so ``z`` counts iterations of
    the second loop.
    """
    if variant not in (1, 2, 3, 4):
        raise ValueError("variant must be 1..4")
    if max_c > 8:
        raise ValueError("suite_loop_at_most is limited to max_c <= 8")
    rep = SuiteReport(f"loopatmost[variant={variant},maxC={max_c}]")
    c, cp = "c", "cp"
    prog = build_loop_at_most(c, cp, _lam_body(variant, c, cp, Inc("z")))
    with _Timer(rep):
        for total in range(max_c + 1):
            for a in range(total + 1):
                rep.cases_run += 1
                alpha = Configuration(c=a, cp=total - a)
                res = reach_set(prog, alpha)
                rep.truncated |= not res.exhausted
                got = {(b["z"], b[c], b[cp]) for b in res.configs}
                want = _lam_expected(variant, a, total - a)
                if got != want:
                    rep.fail(alpha, sorted(want), sorted(got))
                _lam_extremes(rep, variant, alpha, total, got)
    return rep


def _lam_extremes(rep, variant, alpha, total, got):
    limit = total if variant in (1, 2) else total // 2
    for z, cv, cpv in got:
        if z > limit:
            rep.fail(alpha, f"at most {limit} iterations", z)
        if variant == 2 and cv + cpv > 2 * total:
            rep.fail(alpha, "C at most doubles", (cv, cpv))
    if variant in (3, 4) and total % 2:
        return
    want = {1: total, 2: 2 * total, 3: total // 2, 4: total}[variant]
    tight = [(cv, cpv) for z, cv, cpv in got if z == limit]
    if tight != [(want, 0)]:
        rep.fail(alpha, f"l = {limit} forces c = {want}, c' = 0", tight)


# -- evalF and updateB ------------------------------------------------------------


def _index(r: ConformReport) -> int:
    return r.index if r.index is not None else -1


def suite_evalf(d: int, cases: Sequence, policy: ExplorationPolicy = ExplorationPolicy(),
                verbatim: bool = False) -> SuiteReport:
    """Conformity, index monotonicity and exact encodings for one evalF step.

    A case is either ``(v, n, x_scale)``, seeding the good configuration with
    ``x = x_scale * 2^n`` so that ``b`` divides ``x``, or an explicit
    :class:`Configuration` (used for bad and perturbed seeds).
    """
    if d not in (1, 2):
        raise ValueError("suite_evalf supports d in {1, 2}")
    L = GoodConfigLayout(d)
    prog = build_evalf(L, verbatim=verbatim)
    rep = SuiteReport(f"evalf[d={d}]" + ("[verbatim]" if verbatim else ""))
    with _Timer(rep):
        for case in cases:
            if isinstance(case, Configuration):
                alpha = case
            else:
                v, n, scale = case
                if not any(v):
                    rep.notes.append(f"skipped {tuple(v)}, {n}: zero vector")
                    continue
                alpha = good_config(L, tuple(v), n, scale * 2**n)
            rep.cases_run += 1
            _evalf_case(rep, prog, L, alpha, policy)
    return rep


def _evalf_case(rep, prog, L, alpha, policy):
    a_rep = classify_conform(alpha, L)
    res = reach_set(prog, alpha, policy)
    rep.truncated |= not res.exhausted
    top = L.xi(L.d + 1)
    expect = None
    if a_rep.kind == GOOD and alpha[L.x] % alpha[L.b] == 0:
        v, n = a_rep.encoded
        try:
            s = evalf_step(EvalFState(v, n))
            expect = (s.v, s.n)
        except ZeroVector:
            pass
    found = False
    for beta in res.configs:
        try:
            b_rep = classify_conform(beta, L)
        except LayoutViolation as e:
            rep.fail(alpha, "layout counters only", str(e))
            continue
        if not a_rep.conform:
            continue
        if not b_rep.conform:
            rep.fail(alpha, "conform", beta)
        elif _index(b_rep) < _index(a_rep):
            rep.fail(alpha, f"index >= {a_rep.index}", (b_rep.index, beta))
        elif b_rep.kind == GOOD:
            if a_rep.kind != GOOD:
                rep.fail(alpha, "good only from good", beta)
            elif b_rep.encoded != expect or beta[top] != alpha[top]:
                rep.fail(alpha, (expect, alpha[top]), (b_rep.encoded, beta[top]))
            else:
                found = True
    if expect is not None and not found and res.exhausted:
        rep.fail(alpha, f"a good result encoding {expect}", "none")


def suite_update_b(max_c: int, max_b: int) -> SuiteReport:
    """updateB from every ``alpha`` over ``c0, c0', b, b'`` with ``C0 <= max_c, B <= max_b``.

    The bound ``B' <= 2^((C0+1)/2) B`` is compared squared so that even
    ``C0`` needs no half powers.
    """
    L = GoodConfigLayout(1)
    prog = build_update_b(L)
    rep = SuiteReport(f"updateb[maxC={max_c},maxB={max_b}]")
    with _Timer(rep):
        for C0, B in itertools.product(range(max_c + 1), range(max_b + 1)):
            for c0, b in itertools.product(range(C0 + 1), range(B + 1)):
                rep.cases_run += 1
                alpha = Configuration({L.c0: c0, L.c0p: C0 - c0, L.b: b, L.bp: B - b})
                res = reach_set(prog, alpha)
                rep.truncated |= not res.exhausted
                _update_b_case(rep, L, alpha, C0, B, res.configs)
    return rep


def _update_b_case(rep, L, alpha, C0, B, finals):
    bound_sq = 2 ** (C0 + 1) * B * B
    best = 0
    for beta in finals:
        Bb = beta[L.b] + beta[L.bp]
        best = max(best, Bb)
        if beta[L.c0] + beta[L.c0p] != C0:
            rep.fail(alpha, f"C0 = {C0}", beta)
        if Bb * Bb > bound_sq:
            rep.fail(alpha, "B <= 2^((C0+1)/2) B", beta)
        elif Bb * Bb == bound_sq and B > 0 and (beta[L.bp] or beta[L.c0p]):
            rep.fail(alpha, "b' = c0' = 0 at the bound", beta)
    if C0 % 2:
        want = Configuration({L.c0: C0, L.b: 2 ** ((C0 + 1) // 2) * B})
        if want not in finals:
            rep.fail(alpha, want, "not reachable")
        if best != 2 ** ((C0 + 1) // 2) * B:
            rep.fail(alpha, "bound attained", best)


# -- composition ------------------------------------------------------------------


def suite_compose(M: Program, K: int, A: Program, spec: PreamplifierSpec,
                  sum_bound: Optional[int] = None, max_tests: int = 4,
                  max_states: int = 10**7) -> SuiteReport:
    """Finals of ``A |> M`` projected to ``M`` against ``M`` under the K-bounded semantics.

    The composed program is explored under a sum bound large enough for
    ``max_tests`` simulated tests (each costs 2 from x and 2K from y).
    Finals outside the K-bounded set are failures at any bound; missing
    ones may only mean the bound was too small, and are reported as such.
    """
    if K > 4 or len(counters(M)) > 2:
        raise ValueError("suite_compose is limited to K <= 4 and dim M <= 2")
    rep = SuiteReport(f"compose[K={K}]")
    with _Timer(rep):
        m_names = set(counters(M))
        want = set(reach_set(M, ZERO, ExplorationPolicy(sum_bound=K)).configs)
        N = compose(A, spec, M)
        if sum_bound is None:
            sum_bound = 2 * (K + 1) * (max_tests + 1) + K
        res = reach_set(N, ZERO, ExplorationPolicy(sum_bound=sum_bound, max_states=max_states))
        rep.truncated = not res.exhausted
        got = {b for b in res.configs if set(b) <= m_names}
        stray = [b for b in res.configs if not set(b) <= m_names]
        rep.cases_run = len(want | got) + len(stray)
        for b in stray:
            rep.fail(str(M), "finals only over M's counters", b)
        for b in sorted(got - want):
            rep.fail(str(M), "K-bounded reachable", b)
        for b in sorted(want - got):
            rep.fail(str(M), b, f"missing under sum bound {sum_bound}")
    return rep


DEFAULT_EVALF_CASES = {
    1: [((1,), 0, 1), ((1,), 1, 1), ((2,), 0, 1), ((2,), 1, 1), ((1,), 0, 2), ((1,), 1, 2)],
    2: [((1, 0), 0, 1), ((1, 0), 1, 1), ((0, 1), 0, 1), ((0, 1), 1, 1),
        ((1, 1), 0, 1), ((1, 1), 1, 1)],
}
