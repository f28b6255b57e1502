"""Exact piecewise-linear functions on a closed rational interval."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from heapq import merge
from fractions import Fraction
from typing import Iterable, Sequence

from .presentation import as_rational

__all__ = ["PLFunction", "interpolate"]


@dataclass(frozen=True)
class PLFunction:
    """Linear interpolation through ``(xs[i], ys[i])`` with ``xs`` strictly increasing."""

    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs = tuple(x if type(x) is Fraction else as_rational(x) for x in self.xs)
        ys = tuple(y if type(y) is Fraction else as_rational(y) for y in self.ys)
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValueError("need at least two breakpoints with matching values")
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoint x values must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def constant(cls, value, lo=-1, hi=1) -> "PLFunction":
        return cls((lo, hi), (value, value))

    @property
    def lo(self) -> Fraction:
        return self.xs[0]

    @property
    def hi(self) -> Fraction:
        return self.xs[-1]

    @property
    def breakpoints(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip(self.xs, self.ys))

    def __len__(self):
        return len(self.xs)

    def __call__(self, x) -> Fraction:
        x = as_rational(x)
        xs = self.xs
        if not xs[0] <= x <= xs[-1]:
            raise ValueError(f"{x} outside domain [{xs[0]}, {xs[-1]}]")
        i = bisect_left(xs, x)
        if xs[i] == x:
            return self.ys[i]
        x0, x1, y0, y1 = xs[i - 1], xs[i], self.ys[i - 1], self.ys[i]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def sample(self, grid: Sequence) -> list[Fraction]:
        """Values on an ascending grid inside the domain, in one sweep."""
        xs, ys = self.xs, self.ys
        out = []
        j = 0
        last = len(xs) - 1
        if grid and (grid[0] < xs[0] or grid[-1] > xs[-1]):
            raise ValueError("grid leaves the domain")
        for x in grid:
            while j < last and xs[j + 1] <= x:
                j += 1
            if xs[j] == x:
                out.append(ys[j])
            else:
                x0, x1, y0 = xs[j], xs[j + 1], ys[j]
                out.append(y0 + (ys[j + 1] - y0) * (x - x0) / (x1 - x0))
        return out

    def nodes_in(self, lo, hi) -> list[Fraction]:
        """Breakpoint x values inside ``[lo, hi]``."""
        return list(self.xs[bisect_left(self.xs, lo) : bisect_right(self.xs, hi)])

    def restrict(self, lo, hi) -> "PLFunction":
        lo, hi = as_rational(lo), as_rational(hi)
        if not self.lo <= lo < hi <= self.hi:
            raise ValueError(f"[{lo}, {hi}] is not a subinterval of the domain")
        i, j = bisect_left(self.xs, lo), bisect_right(self.xs, hi)
        xs, ys = list(self.xs[i:j]), list(self.ys[i:j])
        if not xs or xs[0] != lo:
            xs.insert(0, lo)
            ys.insert(0, self(lo))
        if xs[-1] != hi:
            xs.append(hi)
            ys.append(self(hi))
        return PLFunction(tuple(xs), tuple(ys))

    def add_ramp(self, coef, anchor, end=1) -> "PLFunction":
        """``self(x) + coef * (x - anchor) / (end - anchor)`` on ``[anchor, hi]``."""
        coef, anchor, end = as_rational(coef), as_rational(anchor), as_rational(end)
        base = self.restrict(anchor, self.hi)
        span = end - anchor
        return PLFunction(base.xs, [y + coef * (x - anchor) / span for x, y in zip(base.xs, base.ys)])

    def simplified(self) -> "PLFunction":
        """Drop interior breakpoints that lie on the segment through their neighbours."""
        xs, ys = [self.xs[0]], [self.ys[0]]
        for k in range(1, len(self.xs) - 1):
            x, y, nx, ny = self.xs[k], self.ys[k], self.xs[k + 1], self.ys[k + 1]
            if (y - ys[-1]) * (nx - xs[-1]) != (ny - ys[-1]) * (x - xs[-1]):
                xs.append(x)
                ys.append(y)
        xs.append(self.xs[-1])
        ys.append(self.ys[-1])
        return PLFunction(tuple(xs), tuple(ys))

    def maximum(self, other: "PLFunction") -> "PLFunction":
        """Pointwise max over the intersection of the two domains, crossings included."""
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        grid = _union([lo], self.nodes_in(lo, hi), other.nodes_in(lo, hi), [hi])
        xs, ys = [], []
        prev = None
        for x, a, b in zip(grid, self.sample(grid), other.sample(grid)):
            d = a - b
            if prev is not None and prev[1] * d < 0:
                # sign change strictly inside the cell: add the crossing
                px, pd = prev
                cx = px + (x - px) * pd / (pd - d)
                xs.append(cx)
                ys.append(self(cx))
            xs.append(x)
            ys.append(max(a, b))
            prev = (x, d)
        return PLFunction(tuple(xs), tuple(ys)).simplified()

    def splice(self, other: "PLFunction") -> "PLFunction":
        """``self`` left of ``other.lo``, ``other`` on its domain, ``self`` to the right."""
        left = [(x, y) for x, y in zip(self.xs, self.ys) if x < other.lo]
        right = [(x, y) for x, y in zip(self.xs, self.ys) if x > other.hi]
        pts = left + list(zip(other.xs, other.ys)) + right
        return PLFunction(tuple(p[0] for p in pts), tuple(p[1] for p in pts)).simplified()


def _union(*ascending) -> list:
    """Merge ascending sequences into one ascending list without repeats."""
    out = []
    for x in merge(*ascending):
        if not out or out[-1] != x:
            out.append(x)
    return out


def interpolate(points: Iterable[tuple]) -> PLFunction:
    pts = sorted((as_rational(x), as_rational(y)) for x, y in points)
    return PLFunction(tuple(p[0] for p in pts), tuple(p[1] for p in pts))


def diff_extremes(f: PLFunction, g: PLFunction, lo=None, hi=None) -> tuple[Fraction, Fraction]:
    """``(min, max)`` of ``f - g`` over ``[lo, hi]`` (defaults: common domain)."""
    lo = max(f.lo, g.lo) if lo is None else as_rational(lo)
    hi = min(f.hi, g.hi) if hi is None else as_rational(hi)
    grid: Sequence = _union([lo], f.nodes_in(lo, hi), g.nodes_in(lo, hi), [hi])
    vals = [a - b for a, b in zip(f.sample(grid), g.sample(grid))]
    return min(vals), max(vals)


def strictly_below_on(f: PLFunction, g: PLFunction, lo, hi, *, closed_left=False, closed_right=False) -> bool:
    """``f < g`` on the interval from ``lo`` to ``hi`` (open ends unless flagged).

    At an open end only ``f <= g`` is needed; interior breakpoints must be strict.
    """
    lo, hi = as_rational(lo), as_rational(hi)
    if lo >= hi:
        return True
    inner = [x for x in _union(f.nodes_in(lo, hi), g.nodes_in(lo, hi)) if x != lo and x != hi]
    mid = (lo + hi) / 2 if not inner else None
    probe = inner if mid is None else [mid]
    if any(not a < b for a, b in zip(f.sample(probe), g.sample(probe))):
        return False
    d_lo, d_hi = g(lo) - f(lo), g(hi) - f(hi)
    if d_lo < 0 or d_hi < 0:
        return False
    if closed_left and d_lo == 0:
        return False
    if closed_right and d_hi == 0:
        return False
    return True
