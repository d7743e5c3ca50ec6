import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from counterprog.gadgets import GoodConfigLayout, build_trivial_preamplifier
from counterprog.ir import ZERO, Configuration, parse
from counterprog.semantics import ExplorationPolicy
from counterprog.verify import (
    BAD,
    GOOD,
    NONCONFORM,
    LayoutViolation,
    SuiteReport,
    applicable_classes,
    check_preamplifier,
    classify_conform,
    flip_inc,
    good_config,
    suite_compose,
    suite_evalf,
    suite_loop_at_most,
    suite_simtest,
    suite_update_b,
)
from counterprog.conform import is_good

L1, L2 = GoodConfigLayout(1), GoodConfigLayout(2)


def test_classifier_examples():
    r = classify_conform(Configuration(c1=1, b=1, x=1, x1=1, x2=2), L1)
    assert (r.kind, r.encoded) == (GOOD, ((1,), 0))
    r = classify_conform(Configuration(x=1, x1=1, x2=3, b=1), L1)
    assert (r.kind, r.index) == (BAD, 2)
    r = classify_conform(ZERO, L1)
    assert r.kind == NONCONFORM and not r.conform
    with pytest.raises(LayoutViolation):
        classify_conform(Configuration(z=1), L1)


@pytest.mark.parametrize("L", [L1, L2])
def test_generated_good_configs_decode(L):
    for v in [(0,) * L.d, (1,) * L.d, (2,) + (0,) * (L.d - 1)]:
        for n in range(3):
            for x in (1, 3):
                r = classify_conform(good_config(L, v, n, x), L)
                assert (r.kind, r.encoded) == (GOOD, (v, n))


def _random_layout_configs(L, count, hi, seed):
    rng = random.Random(seed)
    names = L.all_counters()
    for _ in range(count):
        yield Configuration({c: rng.randint(0, hi) for c in names})


@pytest.mark.parametrize("L", [L1, L2])
def test_classes_are_exclusive_on_random_configs(L):
    # uniform values almost never satisfy the chain, so mix in perturbed good ones
    seen = set()
    configs = list(_random_layout_configs(L, 5000, 8, 1))
    rng = random.Random(2)
    for _ in range(5000):
        v = tuple(rng.randint(0, 2) for _ in range(L.d))
        base = dict(good_config(L, v, rng.randint(0, 2), rng.randint(1, 3)))
        c = rng.choice(L.all_counters())
        base[c] = max(0, base.get(c, 0) + rng.choice((-1, 1, 2)))
        configs.append(Configuration(base))
    for cfg in configs:
        cls = applicable_classes(cfg, L)
        assert len(cls) <= 1, (cfg, cls)
        r = classify_conform(cfg, L)
        seen.add(r.kind)
        if r.kind == GOOD:
            assert is_good({c: cfg[c] for c in L.all_counters()}, L)
    assert {GOOD, BAD, NONCONFORM} <= seen


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 8), min_size=12, max_size=12))
def test_classes_are_exclusive_property(vals):
    cfg = Configuration(dict(zip(L2.all_counters(), vals)))
    assert len(applicable_classes(cfg, L2)) <= 1


def test_report_status_and_json():
    r = SuiteReport("demo")
    assert (r.status, r.exit_code) == ("pass", 0)
    r.truncated = True
    assert (r.status, r.exit_code) == ("inconclusive", 2)
    r.fail({"a": 1}, "x", "y")
    assert (r.status, r.exit_code) == ("fail", 1)
    obj = json.loads(r.to_json())
    assert obj["status"] == "fail" and "elapsed" not in obj
    for _ in range(100):
        r.fail({}, 1, 2)
    assert r.failure_count == 101 and len(r.failures) == 50
    assert "demo" in r.table()


def test_reports_are_deterministic():
    a = suite_loop_at_most(3, 4).to_json()
    b = suite_loop_at_most(3, 4).to_json()
    assert a == b


def test_simtest_suite_and_mutations():
    r = suite_simtest(2, 3)
    assert r.passed and r.cases_run >= 500
    assert suite_simtest(1, 0).passed
    assert not suite_simtest(2, 2, mutate=flip_inc).passed
    assert not suite_simtest(2, 2, mutate=lambda p: flip_inc(p, 1)).passed
    with pytest.raises(ValueError):
        suite_simtest(4, 1)


@pytest.mark.parametrize("variant", [1, 2, 3, 4])
def test_loop_at_most_suites(variant):
    assert suite_loop_at_most(variant, 5).passed
    assert suite_loop_at_most(variant, 0).passed


def test_evalf_suite_small():
    r = suite_evalf(1, [((1,), 0, 1), ((0,), 2, 1)])
    assert r.passed
    assert any("ZeroVector" in n or "zero" in n.lower() for n in r.notes)
    r = suite_evalf(2, [((0, 1), 0, 1)])
    assert r.passed


def test_evalf_suite_catches_listing_order():
    assert not suite_evalf(1, [((1,), 0, 1)], verbatim=True).passed


def test_evalf_suite_truncation_is_inconclusive():
    r = suite_evalf(1, [((1,), 1, 1)], ExplorationPolicy(max_states=50))
    assert r.status == "inconclusive"


def test_update_b_suite():
    assert suite_update_b(4, 2).passed


def test_check_preamplifier():
    A, spec = build_trivial_preamplifier(2)
    assert check_preamplifier(A, spec, 3).passed
    wrong = type(spec)(spec.x, spec.y, spec.b, 3, spec.safe, spec.unsafe, "3")
    r = check_preamplifier(A, wrong, 3)
    assert not r.passed
    expected = {f["expected"] for f in r.to_json_obj()["failures"]}
    assert "b = 3 whenever y = b*x" in expected
    assert "y >= b*x and zero outside {x,y,b}" not in expected
    # an unreachable witness for l fails clause (iii)
    assert not check_preamplifier(A, spec, 3, ExplorationPolicy(sum_bound=6)).passed


@pytest.mark.parametrize("text", [
    "loop { inc a }; test a; inc b",
    "",
    "inc a; test a",
])
def test_compose_suite_small(text):
    A, spec = build_trivial_preamplifier(2)
    assert suite_compose(parse(text), 2, A, spec).passed
