"""The sawtooth space: a base segment plus the graph of a spiky function.

Column ``i`` of a :class:`WTable` controls how far the ``i``-th downward
spike of ``f`` dips: its tip sits at ``b_i * 2**-|W_i|``.  Every spike stays
strictly above the base segment while every column is finite, so the
union of the graph and ``[0,1] x {0}`` is an arc exactly when no column
is infinite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .presentation import Presentation, SparsePoint, as_rational
from .spaces import dyadic_order

__all__ = ["WTable", "SawtoothParams", "default_params", "sawtooth_f", "gen_sawtooth", "spike_index"]


@dataclass(frozen=True)
class WTable:
    """Finite-stage view of a set ``W`` of pairs, split into columns.

    ``columns[n]`` holds the stage numbers ``m`` with ``(n, m)`` in ``W``.
    Columns listed in ``infinite`` stand for ``W_n = N``: their restriction
    below ``i`` has ``i`` elements and their full size is unbounded.
    """

    columns: Mapping[int, frozenset] = field(default_factory=dict)
    stage_horizon: int = 0
    infinite: frozenset = frozenset()

    def __post_init__(self):
        cols = {int(n): frozenset(int(m) for m in ms) for n, ms in dict(self.columns).items()}
        horizon = max([self.stage_horizon, *(max(ms) + 1 for ms in cols.values() if ms)])
        if any(m < 0 for ms in cols.values() for m in ms):
            raise ValueError("stage numbers must be non-negative")
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "stage_horizon", horizon)
        object.__setattr__(self, "infinite", frozenset(int(n) for n in self.infinite))

    def column(self, n: int) -> frozenset:
        return self.columns.get(n, frozenset())

    def size(self, n: int) -> int | None:
        """``|W_n|``, or None for an infinite column."""
        if n in self.infinite:
            return None
        return len(self.column(n))

    def below(self, n: int, i: int) -> int:
        """``|W_n[i]| = |{m in W_n : m < i}|``."""
        if n in self.infinite:
            return i
        return sum(1 for m in self.column(n) if m < i)

    def entering(self, stage: int) -> list[int]:
        """Columns gaining an element at ``stage``, i.e. containing ``stage - 1``."""
        hits = {n for n, ms in self.columns.items() if stage - 1 in ms}
        hits |= {n for n in self.infinite if stage >= 1}
        return sorted(hits)

    def with_element(self, n: int, m: int) -> "WTable":
        cols = dict(self.columns)
        cols[n] = self.column(n) | {m}
        return WTable(cols, self.stage_horizon, self.infinite)


@dataclass(frozen=True)
class SawtoothParams:
    a: Callable[[int], Fraction]
    b: Callable[[int], Fraction]
    l: Callable[[int, int], Fraction]
    r: Callable[[int, int], Fraction]


def default_params() -> SawtoothParams:
    """``a_i = 4**-i``, ``b_i = a_i / 2``, with geometric subdivisions toward ``b_i``."""

    def a(i):
        return Fraction(1, 4**i)

    def b(i):
        return Fraction(1, 2 * 4**i)

    def l(i, j):
        return a(i + 1) + (b(i) - a(i + 1)) * (1 - Fraction(1, 2**j))

    def r(i, j):
        return a(i) - (a(i) - b(i)) * (1 - Fraction(1, 2**j))

    return SawtoothParams(a, b, l, r)


def spike_index(t: Fraction, params: SawtoothParams) -> int:
    """The ``i`` with ``a_{i+1} < t <= a_i`` (``t`` in (0, 1])."""
    i = 0
    while t <= params.a(i + 1):
        i += 1
    return i


def _weight(w: WTable, i: int, j: int) -> Fraction:
    return Fraction(1, 2 ** w.below(i, j))


def sawtooth_f(t, w: WTable, params: SawtoothParams | None = None) -> Fraction:
    params = params or default_params()
    t = as_rational(t)
    if not 0 <= t <= 1:
        raise ValueError(f"f is defined on [0, 1], got {t}")
    if t == 0:
        return Fraction(0)
    i = spike_index(t, params)
    b = params.b(i)
    if t == b:
        size = w.size(i)
        return Fraction(0) if size is None else b / 2**size
    if t < b:
        j = 0
        while params.l(i, j + 1) < t:
            j += 1
        lo, hi = params.l(i, j), params.l(i, j + 1)
        w_lo, w_hi = _weight(w, i, j), _weight(w, i, j + 1)
        return t * ((t - lo) / (hi - lo) * (w_hi - w_lo) + w_lo)
    j = 0
    while params.r(i, j + 1) > t:
        j += 1
    lo, hi = params.r(i, j + 1), params.r(i, j)
    w_near, w_far = _weight(w, i, j + 1), _weight(w, i, j)
    return t * ((t - lo) / (hi - lo) * (w_far - w_near) + w_near)


def gen_sawtooth(w: WTable, depth: int, params: SawtoothParams | None = None) -> Presentation:
    """Base segment and graph of ``f`` on the dyadic grid of the given depth.

    Base points come first, then graph points, both in dyadic refinement
    order.  Exact spike positions ``b_i`` are skipped on the graph since
    ``f(b_i)`` depends on the whole (possibly infinite) column.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    params = params or default_params()
    grid = dyadic_order(depth)
    pts = [SparsePoint.plane(x, 0) for x in grid]
    seen = set(pts)
    for x in grid:
        if x > 0 and x == params.b(spike_index(x, params)):
            continue
        p = SparsePoint.plane(x, sawtooth_f(x, w, params))
        if p not in seen:
            seen.add(p)
            pts.append(p)
    return Presentation(pts, f"sawtooth depth {depth}")
