"""Exact arithmetic for the fast-growing hierarchy.

``F_0(n) = n + 1`` and ``F_d(n) = F_{d-1}^{n+1}(n)``.  Vectors ``v`` are
written 1-based in docstrings (``v[1]`` is the first entry) and stored as
ordinary 0-based tuples.

Values grow fast enough that only tiny arguments can be materialized, so
every routine takes a ``digits`` budget and raises :class:`BudgetExceeded`
instead of running out of memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

DEFAULT_DIGIT_BUDGET = 10**5

_LOG2_10 = math.log2(10)


class BudgetExceeded(ArithmeticError):
    """Raised when a value would exceed the configured digit budget."""


class ZeroVector(ValueError):
    """Raised when the rewrite step is applied to the zero vector."""


def _bit_budget(digits: int) -> int:
    return int(digits * _LOG2_10) + 1


def _check(value: int, bits: int) -> int:
    if value.bit_length() > bits:
        raise BudgetExceeded(f"value exceeds {bits} bits")
    return value


def _describe(k: int) -> str:
    # str() of huge ints trips the interpreter's digit limit
    return str(k) if k.bit_length() < 64 else f"~2^{k.bit_length() - 1}"


def _iterate(d: int, k: int, n: int, bits: int) -> int:
    """Apply ``F_d`` to ``n`` exactly ``k`` times."""
    if k == 0:
        return n
    if d == 0:
        return _check(n + k, bits)
    # F_d(m) >= 2m + 1 for d >= 1, so k applications need at least ~k bits.
    if k > bits + 1:
        raise BudgetExceeded(f"{_describe(k)} iterations of F_{d} exceed {bits} bits")
    for _ in range(k):
        n = _iterate(d - 1, n + 1, n, bits)
    return n


def fg_f(d: int, n: int, digits: int = DEFAULT_DIGIT_BUDGET) -> int:
    """Return ``F_d(n)`` exactly.

    >>> fg_f(2, 2)
    23
    """
    if d < 0 or n < 0:
        raise ValueError("fg_f expects non-negative arguments")
    return _iterate(d, 1, n, _bit_budget(digits))


def fg_f_vec(v: Sequence[int], n: int, digits: int = DEFAULT_DIGIT_BUDGET) -> int:
    """Return ``F_v(n) = F_d^{v[d]} o ... o F_1^{v[1]}(n)``."""
    if n < 0 or any(e < 0 for e in v):
        raise ValueError("fg_f_vec expects non-negative arguments")
    bits = _bit_budget(digits)
    for level, times in enumerate(v, start=1):
        n = _iterate(level, times, n, bits)
    return n


def fg_f_omega(n: int, digits: int = DEFAULT_DIGIT_BUDGET) -> int:
    """Ackermann-like ``F_omega(n) = F_{n+1}(n)``; only defined here for n <= 1."""
    if n not in (0, 1):
        raise BudgetExceeded("F_omega is only evaluated for n in {0, 1}")
    return fg_f(n + 1, n, digits)


@dataclass(frozen=True)
class EvalFState:
    """A pair ``(v, n)`` with ``v`` a vector of ``d`` naturals."""

    v: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(int(e) for e in self.v))
        if not self.v:
            raise ValueError("dimension d must be positive")
        if self.n < 0 or any(e < 0 for e in self.v):
            raise ValueError("entries must be non-negative")

    @property
    def d(self) -> int:
        return len(self.v)

    def is_final(self) -> bool:
        return not any(self.v)

    def norm(self) -> int:
        return sum(self.v)


def lex_less(w: Sequence[int], v: Sequence[int]) -> bool:
    """Strict lexicographic order where the *last* differing index decides."""
    for a, b in zip(reversed(tuple(w)), reversed(tuple(v))):
        if a != b:
            return a < b
    return False


def minimal_index(v: Sequence[int]) -> int:
    """1-based minimal index ``p`` with ``v[p] > 0``."""
    for p, e in enumerate(v, start=1):
        if e > 0:
            return p
    raise ZeroVector("vector is zero")


def evalf_step(s: EvalFState) -> EvalFState:
    """One rewrite step; preserves ``F_v(n)`` and decreases ``v`` lexicographically."""
    p = minimal_index(s.v)
    v = list(s.v)
    v[p - 1] -= 1
    if p == 1:
        return EvalFState(tuple(v), 2 * s.n + 1)
    v[p - 2] += s.n + 1
    return EvalFState(tuple(v), s.n)


def evalf_max(s: EvalFState, digits: int = DEFAULT_DIGIT_BUDGET) -> EvalFState:
    """Iterate :func:`evalf_step` until the vector is zero.

    A run of ``k`` consecutive steps at index 1 maps ``n`` to
    ``2^k (n + 1) - 1``; such runs are applied in one shot so the loop
    count stays proportional to the number of higher-index steps.
    """
    bits = _bit_budget(digits)
    v, n = list(s.v), s.n
    while any(v):
        if v[0] > 0:
            k = v[0]
            if k + n.bit_length() > bits:
                raise BudgetExceeded(f"evalF iteration exceeds {bits} bits")
            n = ((n + 1) << k) - 1
            v[0] = 0
            continue
        p = minimal_index(v)
        v[p - 1] -= 1
        v[p - 2] += n + 1
        if v[p - 2].bit_length() > bits:
            raise BudgetExceeded(f"evalF iteration exceeds {bits} bits")
    return EvalFState(tuple(v), n)
