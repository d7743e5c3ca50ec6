"""Good / i-bad / non-conform classification of evalF configurations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .gadgets import GoodConfigLayout
from .ir import Configuration


class LayoutViolation(ValueError):
    """A counter outside the layout is nonzero."""


GOOD, BAD, NONCONFORM = "good", "bad", "nonconform"


@dataclass(frozen=True)
class ConformReport:
    kind: str
    index: Optional[int] = None
    encoded: Optional[tuple] = None  # (v, n) when good

    @property
    def conform(self) -> bool:
        return self.kind != NONCONFORM


def good_config(layout: GoodConfigLayout, v, n: int, x: int) -> Configuration:
    """The good configuration encoding ``(v, n)`` with ``x`` as given."""
    L = layout
    if len(v) != L.d:
        raise ValueError(f"vector must have {L.d} entries")
    if x <= 0:
        raise ValueError("good configurations need x > 0")
    vals = {L.x: x, L.b: 2**n, L.c0: n, L.xi(1): 2**n * x}
    for i in range(1, L.d + 1):
        vals[L.ci(i)] = v[i - 1]
        vals[L.xi(i + 1)] = 2 ** v[i - 1] * vals[L.xi(i)]
    return Configuration(vals)


def _vals(cfg: Mapping, layout: GoodConfigLayout):
    names = set(layout.all_counters())
    extra = [c for c, v in cfg.items() if v and c not in names]
    if extra:
        raise LayoutViolation(f"counters outside the layout are nonzero: {sorted(extra)}")
    return {c: cfg.get(c, 0) for c in names}


def _chain_holds(r, L, j):
    """``x_j + y = 2^{c_{j-1}} (x_{j-1} + y)``."""
    return r[L.xi(j)] + r[L.y] == 2 ** r[L.ci(j - 1)] * (r[L.xi(j - 1)] + r[L.y])


def is_good(r, L) -> bool:
    return (
        r[L.xp] == r[L.y] == r[L.bp] == r[L.c0p] == 0
        and r[L.x] > 0
        and r[L.b] == 2 ** r[L.c0]
        and r[L.xi(1)] == 2 ** r[L.c0] * r[L.x]
        and all(r[L.xi(i)] == 2 ** r[L.ci(i - 1)] * r[L.xi(i - 1)] for i in range(2, L.d + 2))
    )


def is_bad(r, L, i: int) -> bool:
    d = L.d
    if i == 1:
        C0 = r[L.c0] + r[L.c0p]
        return (
            r[L.xp] == r[L.y] == 0
            and r[L.x] > 0
            and r[L.b] + r[L.bp] < 2**C0
            and r[L.xi(1)] == 2**C0 * r[L.x]
            and all(r[L.xi(j)] == 2 ** r[L.ci(j - 1)] * r[L.xi(j - 1)] for j in range(2, d + 2))
        )
    return (
        r[L.x] + r[L.xp] > 0
        and r[L.xi(i)] + r[L.y] > 2 ** r[L.ci(i - 1)] * (r[L.xi(i - 1)] + r[L.y])
        and all(_chain_holds(r, L, j) for j in range(i + 1, d + 2))
    )


def applicable_classes(cfg: Mapping, layout: GoodConfigLayout) -> list:
    """Every class whose defining clauses hold (used to audit exclusivity)."""
    r = _vals(cfg, layout)
    out = [(BAD, i) for i in range(1, layout.d + 2) if is_bad(r, layout, i)]
    if is_good(r, layout):
        out.append((GOOD, 0))
    return out


def classify_conform(cfg: Mapping, layout: GoodConfigLayout) -> ConformReport:
    L = layout
    r = _vals(cfg, L)
    for i in range(L.d + 1, 1, -1):
        if is_bad(r, L, i):
            return ConformReport(BAD, i)
    if is_bad(r, L, 1):
        return ConformReport(BAD, 1)
    if is_good(r, L):
        v = tuple(r[L.ci(i)] for i in range(1, L.d + 1))
        return ConformReport(GOOD, 0, (v, r[L.c0]))
    return ConformReport(NONCONFORM)
