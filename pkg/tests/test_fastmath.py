import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from counterprog.fastmath import (
    BudgetExceeded,
    EvalFState,
    ZeroVector,
    evalf_max,
    evalf_step,
    fg_f,
    fg_f_omega,
    fg_f_vec,
    lex_less,
    minimal_index,
)


def naive_f(d, n):
    # direct transcription of the recursion, only usable for tiny inputs
    if d == 0:
        return n + 1
    for _ in range(n + 1):
        n = naive_f(d - 1, n)
    return n


@pytest.mark.parametrize("d,n", [(d, n) for d in range(3) for n in range(5)] + [(3, 0), (3, 1)])
def test_fg_f_matches_naive_recursion(d, n):
    assert fg_f(d, n) == naive_f(d, n)


def test_small_values():
    assert fg_f(2, 2) == 23
    assert fg_f(3, 1) == 2047
    assert fg_f_omega(0) == 1
    assert fg_f_omega(1) == 7


def test_f_vec_applies_low_levels_first():
    # F_2(F_1(1)) = F_2(3) = 63, whereas F_1(F_2(1)) = 15
    assert fg_f_vec((1, 1), 1) == 63
    assert fg_f_vec((0, 0, 0), 9) == 9


def test_budget_guard():
    with pytest.raises(BudgetExceeded):
        fg_f(4, 2, digits=1000)
    with pytest.raises(BudgetExceeded):
        fg_f_omega(2)
    with pytest.raises(BudgetExceeded):
        evalf_max(EvalFState((0, 0, 3), 3), digits=100)


def test_negative_arguments_rejected():
    with pytest.raises(ValueError):
        fg_f(-1, 0)
    with pytest.raises(ValueError):
        EvalFState((1, -1), 0)
    with pytest.raises(ValueError):
        EvalFState((), 0)


def test_lex_order_last_index_decides():
    assert lex_less((5, 0), (0, 1))
    assert not lex_less((0, 1), (5, 0))
    assert not lex_less((1, 2), (1, 2))


def test_step_examples():
    assert evalf_step(EvalFState((1,), 0)) == EvalFState((0,), 1)
    assert evalf_step(EvalFState((0, 1), 0)) == EvalFState((1, 0), 0)
    assert evalf_step(EvalFState((0, 2), 1)) == EvalFState((2, 1), 1)
    with pytest.raises(ZeroVector):
        evalf_step(EvalFState((0, 0), 3))
    assert minimal_index((0, 0, 4)) == 3


def test_evalf_max_examples():
    assert evalf_max(EvalFState((0, 1), 1)) == EvalFState((0, 0), 7)
    assert evalf_max(EvalFState((0, 2), 1)) == EvalFState((0, 0), 2047)
    assert evalf_max(EvalFState((0, 0), 4)) == EvalFState((0, 0), 4)


def _unbatched_max(s):
    while not s.is_final():
        s = evalf_step(s)
    return s


@pytest.mark.parametrize("v,n", [((2,), 3), ((1, 1), 1), ((0, 1, 0), 0), ((1, 0, 1), 0), ((0, 2), 0)])
def test_batched_iteration_equals_stepwise(v, n):
    assert evalf_max(EvalFState(v, n)) == _unbatched_max(EvalFState(v, n))


vecs = st.lists(st.integers(0, 2), min_size=1, max_size=3)


@settings(max_examples=200, deadline=None)
@given(vecs.filter(any), st.integers(0, 3))
def test_step_preserves_value_and_decreases(v, n):
    s = EvalFState(tuple(v), n)
    t = evalf_step(s)
    assert lex_less(t.v, s.v)
    try:
        assert fg_f_vec(t.v, t.n, digits=2000) == fg_f_vec(s.v, s.n, digits=2000)
    except BudgetExceeded:
        pass


@pytest.mark.parametrize("d,n", list(itertools.product(range(1, 4), range(3))))
def test_max_iteration_from_full_vector(d, n):
    try:
        want = fg_f(d + 1, n, digits=5000)
    except BudgetExceeded:
        pytest.skip("value exceeds budget")
    assert evalf_max(EvalFState((0,) * (d - 1) + (n + 1,), n), digits=5000) == EvalFState((0,) * d, want)


def test_budget_message_for_huge_iteration_counts():
    # F_2 applied F_2(F_2(3))+1 times; the count alone has thousands of digits
    with pytest.raises(BudgetExceeded, match="iterations"):
        fg_f_vec((0, 2, 2), 3)
