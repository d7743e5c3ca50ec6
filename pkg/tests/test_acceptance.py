"""Acceptance gate: one test (or a few parts) per criterion, each with its time limit."""

import time
from contextlib import contextmanager
from itertools import product

import pytest

from counterprog.fastmath import BudgetExceeded, EvalFState, evalf_max, fg_f, fg_f_vec
from counterprog.gadgets import (
    build_ack,
    build_ack_reduced,
    build_simtest,
    build_trivial_preamplifier,
)
from counterprog.ir import ZERO, General, classify, dimension, enumerate_programs, parse, size
from counterprog.semantics import (
    ExplorationPolicy,
    bounded_configurations,
    denotational_relation,
    engine_relation,
    reach_set,
)
from counterprog.vass import HasInteriorTests, VassSystem, export_vass, vass_reach
from counterprog.verify import (
    DEFAULT_EVALF_CASES,
    check_preamplifier,
    flip_inc,
    suite_compose,
    suite_evalf,
    suite_loop_at_most,
    suite_simtest,
    suite_update_b,
)

# frozen once from d <= 3, n <= 2: the largest ratio size / (d 4^n) is 143, at (1, 0)
ACK_SIZE_CONSTANT = 144

COMPOSE_TARGETS = [
    "loop { inc a }; test a; inc b",
    "loop { inc a }; loop { dec a; inc b }; test a",
    "loop { choice { inc a } or { dec a; inc b } or { test a; dec b } }",
]


@contextmanager
def within(seconds):
    t = time.perf_counter()
    yield
    took = time.perf_counter() - t
    assert took < seconds, f"took {took:.1f}s, limit {seconds}s"


@pytest.fixture(scope="module")
def small_programs():
    return enumerate_programs(6, ["a", "b"])


@pytest.mark.criterion(1, "fast-growing closed forms and F_2 by rewriting")
def test_c1_fast_growing_exactness():
    with within(1):
        for n in range(21):
            assert fg_f(1, n) == 2 * n + 1
            assert fg_f(2, n) == 2 ** (n + 1) * (n + 1) - 1
        for n in range(4):
            assert evalf_max(EvalFState((n + 1,), n)) == EvalFState((0,), fg_f(2, n))


@pytest.mark.criterion(2, "F_v(n) >= 2^|v| n + |v|")
def test_c2_vector_lower_bound():
    checked = skipped = 0
    with within(1):
        for d in range(1, 4):
            for v in product(range(3), repeat=d):
                s = sum(v)
                for n in range(4):
                    try:
                        val = fg_f_vec(v, n, digits=10**4)
                    except BudgetExceeded:
                        skipped += 1
                        continue
                    checked += 1
                    assert val >= 2**s * n + s, (v, n)
    assert checked > skipped


@pytest.mark.criterion(3, "search engine equals denotational relation")
def test_c3_oracle_agreement(small_programs):
    assert len(small_programs) == 9684
    with within(300):
        for p in small_programs:
            for K in range(4):
                assert engine_relation(p, K, ["a", "b"]) == denotational_relation(p, K, ["a", "b"]), (p, K)


@pytest.mark.criterion(4, "simtest suite and mutation control")
def test_c4_simtest():
    with within(120):
        r = suite_simtest(3, 3)
        assert r.passed, r.table()
        assert not suite_simtest(3, 3, mutate=flip_inc).passed


@pytest.mark.criterion(5, "loop-at-most variants 1-4")
def test_c5_loop_at_most():
    with within(60):
        for variant in (1, 2, 3, 4):
            r = suite_loop_at_most(variant, 6)
            assert r.passed, r.table()


@pytest.mark.criterion(6, "evalF conformity and updateB doubling")
def test_c6_evalf():
    with within(600):
        for d in (1, 2):
            r = suite_evalf(d, DEFAULT_EVALF_CASES[d], ExplorationPolicy(max_states=10**7))
            assert r.passed, r.table()
        r = suite_update_b(5, 3)
        assert r.passed, r.table()


@pytest.mark.criterion(7, "preamplifier validation")
def test_c7_trivial_preamplifiers():
    with within(120):
        for K in range(1, 5):
            A, spec = build_trivial_preamplifier(K)
            bound = K + 3 * (K + 1)
            r = check_preamplifier(A, spec, 3, ExplorationPolicy(sum_bound=bound))
            assert r.passed, r.table()


@pytest.mark.criterion(7, "preamplifier validation")
def test_c7_ack_1_0():
    A, spec = build_ack(1, 0)
    assert spec.K == 2
    with within(300):
        r = check_preamplifier(A, spec, 2, ExplorationPolicy(sum_bound=16))
    assert r.passed and not r.truncated, r.table()


@pytest.mark.criterion(7, "preamplifier validation")
@pytest.mark.xfail(strict=True, reason="dropping x_d at d = 1 lets unfinished halvings reach the final tests")
def test_c7_ack_reduced_1_0():
    A, spec = build_ack_reduced(1, 0)
    assert spec.K == 2
    with within(300):
        r = check_preamplifier(A, spec, 2, ExplorationPolicy(sum_bound=16))
    assert r.passed, r.table()


@pytest.mark.criterion(8, "A |> M equals the K-bounded semantics of M")
def test_c8_composition():
    with within(600):
        for K in (2, 3):
            A, spec = build_trivial_preamplifier(K)
            for text in COMPOSE_TARGETS:
                r = suite_compose(parse(text), K, A, spec)
                assert r.passed, (K, text, r.table())


@pytest.mark.criterion(9, "dimension and size accounting")
def test_c9_structure():
    with within(1):
        for d in range(1, 4):
            for n in range(3):
                A, _ = build_ack(d, n)
                R, _ = build_ack_reduced(d, n)
                assert dimension(A) == 2 * d + 8
                assert dimension(R) == 2 * d + 6
                assert size(A) <= ACK_SIZE_CONSTANT * d * 4**n


@pytest.mark.criterion(10, "VASS export round trip")
def test_c10_vass_round_trip(small_programs):
    exported = 0
    with within(300):
        for p in small_programs:
            if isinstance(classify(p), General):
                with pytest.raises(HasInteriorTests):
                    export_vass(p)
                continue
            exported += 1
            v = VassSystem.from_text(export_vass(p).to_text())
            for K in range(4):
                pol = ExplorationPolicy(sum_bound=K)
                for alpha in bounded_configurations(["a", "b"], K):
                    exhausted, got = vass_reach(v, alpha, pol)
                    assert exhausted and got == reach_set(p, alpha, pol).configs, (p, alpha)
    assert exported == 3430
