"""Presented Polish spaces over exact rational coordinates.

A presentation is a finite prefix of special points in a sup-metric
sequence space.  Every distance between two such points is an exact
rational, so the metric "oracle" never approximates.  A :class:`FiniteNet`
stores the pairwise distances of the first ``n`` points as integer
numerators over one common denominator when that stays manageable, and
otherwise as floats with an exact fallback near every threshold.  Both
keep the epsilon-graph queries vectorised without giving up exactness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Ball",
    "FiniteNet",
    "PathWitness",
    "Presentation",
    "SparsePoint",
    "as_rational",
    "ball_relation",
    "build_net",
    "components",
    "eps_path",
    "format_rational",
    "metric_approx",
    "net_from_distances",
    "verify_fast_cauchy",
]

# int64 headroom: numerators times the largest eps denominator must not overflow
_INT64_SAFE = 2**40
# above this, scaled numerators are big integers; switch to the float filter
_EXACT_LIMIT = 2**200


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: a float silently carries binary rounding into
    what is supposed to be exact data.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError(f"refusing float {value!r}; pass a Fraction or 'p/q' string")
    return Fraction(value)


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


class SparsePoint:
    """Finitely supported rational vector; absent coordinates are zero."""

    __slots__ = ("_coords", "_hash")

    def __init__(self, coords: Mapping[int, object] | Iterable[tuple[int, object]] = ()):
        items = coords.items() if isinstance(coords, Mapping) else coords
        merged: dict[int, Fraction] = {}
        for key, value in items:
            key = int(key)
            if key < 0:
                raise ValueError(f"coordinate index must be >= 0, got {key}")
            if key in merged:
                raise ValueError(f"duplicate coordinate index {key}")
            merged[key] = as_rational(value)
        self._coords = tuple(sorted((k, v) for k, v in merged.items() if v != 0))
        self._hash = hash(self._coords)

    @classmethod
    def plane(cls, x, y) -> "SparsePoint":
        return cls({0: x, 1: y})

    @property
    def coords(self) -> dict[int, Fraction]:
        return dict(self._coords)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self._coords)

    def items(self):
        return iter(self._coords)

    def __getitem__(self, index: int) -> Fraction:
        for k, v in self._coords:
            if k == index:
                return v
        return Fraction(0)

    def __add__(self, other: "SparsePoint") -> "SparsePoint":
        out = dict(self._coords)
        for k, v in other._coords:
            out[k] = out.get(k, Fraction(0)) + v
        return SparsePoint(out)

    def __sub__(self, other: "SparsePoint") -> "SparsePoint":
        return self + other.scaled(-1)

    def scaled(self, factor) -> "SparsePoint":
        factor = as_rational(factor)
        return SparsePoint({k: v * factor for k, v in self._coords})

    def shifted(self, offsets: Mapping[int, object]) -> "SparsePoint":
        out = dict(self._coords)
        for k, v in offsets.items():
            out[k] = out.get(k, Fraction(0)) + as_rational(v)
        return SparsePoint(out)

    def remapped(self, index_map) -> "SparsePoint":
        """Move coordinate ``k`` to ``index_map(k)``."""
        return SparsePoint({index_map(k): v for k, v in self._coords})

    def norm(self) -> Fraction:
        return max((abs(v) for _, v in self._coords), default=Fraction(0))

    def sup_dist(self, other: "SparsePoint") -> Fraction:
        a, b = dict(self._coords), dict(other._coords)
        zero = Fraction(0)
        return max((abs(a.get(k, zero) - b.get(k, zero)) for k in a.keys() | b.keys()), default=zero)

    def __eq__(self, other) -> bool:
        return isinstance(other, SparsePoint) and self._coords == other._coords

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {format_rational(v)}" for k, v in self._coords)
        return f"SparsePoint({{{inner}}})"


class Presentation:
    """Enumerated special points of a sup-metric sequence space.

    ``points[i]`` is special point ``i``.  The enumeration order is part
    of the presentation: checkers that quantify over "the first n points"
    read it in this order.
    """

    ambient = "sup-metric"

    def __init__(self, points: Iterable[SparsePoint], label: str = "", *, strict: bool = True):
        self.points: tuple[SparsePoint, ...] = tuple(points)
        self.label = label
        if strict and len(set(self.points)) != len(self.points):
            seen: dict[SparsePoint, int] = {}
            for i, p in enumerate(self.points):
                if p in seen:
                    raise ValueError(f"points {seen[p]} and {i} coincide: {p!r}")
                seen[p] = i

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({len(self)} points, label={self.label!r})"

    def _check_id(self, i: int) -> None:
        if not 0 <= i < len(self.points):
            raise KeyError(f"unknown point id {i} (presentation has {len(self.points)} points)")

    def distance(self, i: int, j: int) -> Fraction:
        self._check_id(i)
        self._check_id(j)
        return self.points[i].sup_dist(self.points[j])

    def permuted(self, order: Sequence[int]) -> "Presentation":
        if sorted(order) != list(range(len(self))):
            raise ValueError("order must be a permutation of the point ids")
        return Presentation([self.points[i] for i in order], self.label, strict=False)

    def scaled(self, factor) -> "Presentation":
        return Presentation([p.scaled(factor) for p in self.points], self.label, strict=False)

    def distance_matrix(self, n: int) -> tuple[np.ndarray, int]:
        """Integer numerators and common denominator of the first ``n`` points."""
        pts = self.points[:n]
        keys, den = _layout(pts)
        big = max((abs(v) * den for p in pts for _, v in p.items()), default=0) >= _INT64_SAFE
        dtype = object if big else np.int64
        coords = np.zeros((len(pts), len(keys)), dtype=dtype)
        for r, p in enumerate(pts):
            for k, v in p.items():
                coords[r, keys[k]] = v.numerator * (den // v.denominator)
        return _sup_pairs(coords, dtype), den

    def approx_matrix(self, n: int) -> tuple[np.ndarray, float]:
        """Float pairwise distances of the first ``n`` points and an error bound."""
        pts = self.points[:n]
        keys = {k: c for c, k in enumerate(sorted({k for p in pts for k in p.support}))}
        coords = np.zeros((len(pts), len(keys)))
        for r, p in enumerate(pts):
            for k, v in p.items():
                coords[r, keys[k]] = float(v)
        scale = float(np.abs(coords).max(initial=0.0))
        # each coordinate rounds once, the difference once more
        return _sup_pairs(coords, float), 8 * scale * 2.0**-52


def _layout(pts) -> tuple[dict, int]:
    keys = {k: c for c, k in enumerate(sorted({k for p in pts for k in p.support}))}
    den = 1
    for p in pts:
        for _, v in p.items():
            den = math.lcm(den, v.denominator)
    return keys, den


def _sup_pairs(coords: np.ndarray, dtype) -> np.ndarray:
    n = coords.shape[0]
    out = np.zeros((n, n), dtype=dtype)
    for c in range(coords.shape[1]):
        column = coords[:, c]
        np.maximum(out, abs(column[:, None] - column[None, :]), out=out)
    return out


def metric_approx(pres: Presentation, i: int, j: int, k: int = 0) -> Fraction:
    """Distance between special points ``i`` and ``j`` to within ``2**-k``.

    With rational coordinates under the sup metric the returned value is
    the exact distance for every ``k``.
    """
    return pres.distance(i, j)


@dataclass(frozen=True)
class Ball:
    """Ball centred on a net point.  ``closed`` selects ``<=`` over ``<``."""

    center: int
    radius: Fraction
    closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "radius", as_rational(self.radius))


@dataclass(frozen=True)
class PathWitness:
    points: tuple[int, ...]
    eps: Fraction


@dataclass(eq=False)
class FiniteNet:
    """Exact pairwise distances of a finite fragment of a presentation.

    Two storage modes share one interface.  With moderate denominators,
    ``num[i, j] / denom`` is the distance between positions ``i`` and
    ``j``.  Otherwise ``num`` is None and ``approx`` holds float distances
    accurate to ``tol``; every comparison that falls inside that margin is
    settled exactly from ``points``.  Either way all answers are exact.
    ``ids[i]`` is the presentation id at position ``i``.
    """

    ids: tuple[int, ...]
    num: np.ndarray | None
    denom: int
    precision_k: int = 0
    points: tuple = ()
    approx: np.ndarray | None = None
    tol: float = 0.0
    table: tuple | None = None  # exact Fraction rows, for nets without coordinates
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def exact(self) -> bool:
        return self.num is not None

    def dist(self, i: int, j: int) -> Fraction:
        if self.exact:
            return Fraction(int(self.num[i, j]), self.denom)
        if self.table is not None:
            return self.table[i][j]
        return self.points[i].sup_dist(self.points[j])

    def dist_matrix(self) -> list[list[Fraction]]:
        return [[self.dist(i, j) for j in range(self.n)] for i in range(self.n)]

    def _scaled_threshold(self, r: Fraction) -> tuple[np.ndarray, int]:
        r = as_rational(r)
        rhs = r.numerator * self.denom
        num = self.num
        if num.dtype != object:
            top = max(int(num.max(initial=0)), 1) * r.denominator
            if top >= 2**62 or abs(rhs) >= 2**62:
                num = num.astype(object)
        lhs = num * r.denominator if r.denominator != 1 else num
        return lhs, rhs

    def _filtered(self, r: Fraction, strict: bool) -> np.ndarray:
        margin = self.tol + 8 * abs(float(r)) * 2.0**-52
        rf = float(r)
        out = self.approx < rf - margin
        unsure = np.argwhere(np.abs(self.approx - rf) <= margin)
        for i, j in unsure:
            if i <= j:
                d = self.dist(int(i), int(j))
                out[i, j] = out[j, i] = d < r if strict else d <= r
        return out

    def within(self, r, strict: bool = True) -> np.ndarray:
        """Boolean matrix of ``d(i, j) < r`` (or ``<=`` when not strict)."""
        r = as_rational(r)
        key = ("within", r, strict)
        hit = self._cache.get(key)
        if hit is None:
            if self.exact:
                lhs, rhs = self._scaled_threshold(r)
                hit = np.asarray(lhs < rhs if strict else lhs <= rhs, dtype=bool)
            else:
                hit = self._filtered(r, strict)
            hit.setflags(write=False)
            self._cache[key] = hit
        return hit

    def separated(self) -> np.ndarray:
        """Boolean matrix of ``d(i, j) > 0``."""
        return ~self.within(0, strict=False)

    def row_within(self, center: int, r, strict: bool = True) -> np.ndarray:
        return self.within(r, strict)[center]

    def diameter(self) -> Fraction:
        if self.exact:
            return Fraction(int(self.num.max(initial=0)), self.denom)
        top = float(self.approx.max(initial=0.0))
        cand = np.argwhere(self.approx >= top - 2 * self.tol)
        return max((self.dist(int(i), int(j)) for i, j in cand), default=Fraction(0))

    def region_mask(self, forbidden: Iterable[Ball] | None) -> np.ndarray:
        """Points lying in the union of ``forbidden`` balls."""
        mask = np.zeros(self.n, dtype=bool)
        for ball in forbidden or ():
            mask |= self.row_within(ball.center, ball.radius, strict=not ball.closed)
        return mask

    def verify_triangle(self) -> bool:
        if self.exact:
            num = self.num
            if not (num == num.T).all() or any(num[i, i] != 0 for i in range(self.n)):
                return False
            for i in range(self.n):
                if (num > num[i][:, None] + num[i][None, :]).any():
                    return False
            return True
        a = self.approx
        if not (a == a.T).all() or a.diagonal().any():
            return False
        for i in range(self.n):
            for j, k in np.argwhere(a > a[i][:, None] + a[i][None, :] - 3 * self.tol):
                if self.dist(int(j), int(k)) > self.dist(int(j), i) + self.dist(i, int(k)):
                    return False
        return True

    def subnet(self, positions: Sequence[int]) -> "FiniteNet":
        idx = np.asarray(positions, dtype=int)
        ids = tuple(self.ids[i] for i in idx)
        pts = tuple(self.points[i] for i in idx) if self.points else ()
        if self.exact:
            return FiniteNet(ids, self.num[np.ix_(idx, idx)], self.denom, self.precision_k, pts)
        table = None if self.table is None else tuple(tuple(self.table[i][j] for j in idx) for i in idx)
        return FiniteNet(ids, None, 1, self.precision_k, pts, self.approx[np.ix_(idx, idx)], self.tol, table)


def build_net(pres: Presentation, n: int, k: int = 0) -> FiniteNet:
    if n < 1:
        raise ValueError("a net needs at least one point")
    if n > len(pres):
        raise ValueError(f"presentation has only {len(pres)} points, {n} requested")
    pts = pres.points[:n]
    _, den = _layout(pts)
    if max((abs(v) * den for p in pts for _, v in p.items()), default=0) < _EXACT_LIMIT:
        num, den = pres.distance_matrix(n)
        return FiniteNet(tuple(range(n)), num, den, k, pts)
    approx, tol = pres.approx_matrix(n)
    return FiniteNet(tuple(range(n)), None, 1, k, pts, approx, tol)


def net_from_distances(rows: Sequence[Sequence], ids: Sequence[int] | None = None, k: int = 0) -> FiniteNet:
    """Net over an explicit exact distance matrix (no coordinates needed)."""
    table = tuple(tuple(as_rational(v) for v in row) for row in rows)
    n = len(table)
    if n < 1 or any(len(row) != n for row in table):
        raise ValueError("distance matrix must be square and non-empty")
    ids = tuple(range(n)) if ids is None else tuple(ids)
    den = 1
    for row in table:
        for v in row:
            den = math.lcm(den, v.denominator)
    top = max(abs(v) for row in table for v in row) * den
    if top < _EXACT_LIMIT:
        dtype = object if top >= _INT64_SAFE else np.int64
        num = np.array([[v.numerator * (den // v.denominator) for v in row] for row in table], dtype=dtype)
        return FiniteNet(ids, num, den, k)
    approx = np.array([[float(v) for v in row] for row in table])
    tol = 4 * float(np.abs(approx).max(initial=0.0)) * 2.0**-52
    return FiniteNet(ids, None, 1, k, (), approx, tol, table)


def eps_path(
    net: FiniteNet,
    x: int,
    y: int,
    eps,
    forbidden: Iterable[Ball] | None = None,
) -> PathWitness | None:
    """Shortest eps-path from ``x`` to ``y`` avoiding ``forbidden``, or None.

    Vertices are the net points outside the forbidden region, edges join
    points at distance strictly below ``eps``.  A forbidden endpoint means
    no path: the path must lie entirely in the allowed region.
    """
    eps = as_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    allowed = ~net.region_mask(forbidden)
    if not (allowed[x] and allowed[y]):
        return None
    if x == y:
        return PathWitness((x,), eps)
    adj = net.within(eps)
    parent = np.full(net.n, -1, dtype=np.int64)
    visited = np.zeros(net.n, dtype=bool)
    visited[x] = True
    frontier = np.array([x])
    while frontier.size:
        reach = adj[frontier] & allowed & ~visited
        fresh = np.flatnonzero(reach.any(axis=0))
        if fresh.size == 0:
            return None
        # first frontier vertex adjacent to each fresh vertex
        parent[fresh] = frontier[np.argmax(reach[:, fresh], axis=0)]
        visited[fresh] = True
        if visited[y]:
            path = [y]
            while path[-1] != x:
                path.append(int(parent[path[-1]]))
            return PathWitness(tuple(reversed(path)), eps)
        frontier = fresh
    return None


def components(net: FiniteNet, eps, members: np.ndarray | None = None) -> np.ndarray:
    """Label eps-path components of the net restricted to ``members``.

    Returns an int array of length ``n``; points outside ``members`` get -1.
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    if members is None:
        members = np.ones(net.n, dtype=bool)
    idx = np.flatnonzero(members)
    labels = np.full(net.n, -1, dtype=np.int64)
    if idx.size == 0:
        return labels
    sub = net.within(eps)[np.ix_(idx, idx)]
    _, lab = connected_components(csr_matrix(sub), directed=False)
    labels[idx] = lab
    return labels


def verify_fast_cauchy(seq: Sequence) -> bool:
    """True iff ``|x[i+1] - x[i]| < 2**-i`` for every consecutive pair."""
    values = [as_rational(v) for v in seq]
    return all(abs(b - a) < Fraction(1, 2**i) for i, (a, b) in enumerate(zip(values, values[1:])))


def ball_relation(net: FiniteNet, center: int, radius, p: int, mode: str = "open") -> bool:
    radius = as_rational(radius)
    d = net.dist(center, p)
    if mode == "open":
        return d < radius
    if mode == "closed":
        return d <= radius
    raise ValueError(f"mode must be 'open' or 'closed', got {mode!r}")
