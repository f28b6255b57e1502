"""Reference presentations: dyadic interval, rational circle, truncated line."""

from __future__ import annotations

import math
from fractions import Fraction

from .presentation import Presentation, SparsePoint, as_rational

__all__ = ["dyadic_order", "dyadic_interval", "rational_circle", "truncated_line", "clusters"]


def dyadic_order(depth: int) -> list[Fraction]:
    """0, 1, 1/2, 1/4, 3/4, 1/8, ... up to denominator ``2**depth``."""
    out = [Fraction(0), Fraction(1)]
    for level in range(1, depth + 1):
        out.extend(Fraction(t, 2**level) for t in range(1, 2**level, 2))
    return out


def dyadic_interval(depth: int, lo=0, hi=1) -> Presentation:
    lo, hi = as_rational(lo), as_rational(hi)
    pts = [SparsePoint({0: lo + (hi - lo) * t}) for t in dyadic_order(depth)]
    return Presentation(pts, f"dyadic[{lo},{hi}] depth {depth}")


def _bit_reversed(n: int) -> list[int]:
    bits = max(n - 1, 1).bit_length()
    order = sorted(range(n), key=lambda k: int(format(k, f"0{bits}b")[::-1], 2))
    return order


def rational_circle(n: int = 64, max_den: int = 10_000) -> Presentation:
    """``n`` exact rational points on the unit circle, nearly equally spaced.

    Uses ``t -> ((1-t^2)/(1+t^2), 2t/(1+t^2))`` with ``t`` a rational
    approximation of ``tan(pi k / n)``; the antipode of (1, 0) is placed
    directly.  Points are enumerated in bit-reversed order so any prefix is
    spread around the circle.
    """
    pts = []
    for k in _bit_reversed(n):
        if 2 * k == n:
            pts.append(SparsePoint.plane(-1, 0))
            continue
        angle = math.pi * k / n
        t = Fraction(math.tan(angle if k < n / 2 else angle - math.pi)).limit_denominator(max_den)
        pts.append(SparsePoint.plane((1 - t * t) / (1 + t * t), 2 * t / (1 + t * t)))
    return Presentation(pts, f"circle {n}")


def truncated_line(half_width: int, depth: int) -> Presentation:
    """The interval [-N, N] at step ``2**-depth``: coarse levels first, each outward from 0."""
    values, seen = [], set()
    for level in range(depth + 1):
        h = Fraction(1, 2**level)
        steps = int(half_width / h)
        for k in sorted(range(-steps, steps + 1), key=lambda k: (abs(k), -k)):
            v = k * h
            if v not in seen:
                seen.add(v)
                values.append(v)
    return Presentation([SparsePoint({0: v}) for v in values], f"line[-{half_width},{half_width}]")


def clusters(centers, spread, depth: int = 3) -> Presentation:
    """Dyadic segments of length ``spread`` starting at each centre, on the line."""
    pts = []
    for c in centers:
        c = as_rational(c)
        pts.extend(SparsePoint({0: c + as_rational(spread) * t}) for t in dyadic_order(depth))
    return Presentation(pts, "clusters")
