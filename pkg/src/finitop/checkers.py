"""Bounded-resolution deciders for the arc and circle characterisations.

Every condition quantifies over "all eps > 0" or "some delta".  Here each
such quantifier ranges over an explicit finite grid carried by a
:class:`Resolution`, and each checker returns a :class:`Verdict` whose
witness can be replayed against the same net with :func:`replay`.

Witness dictionaries hold only ints, Fractions, strings, lists and dicts
so that reports can serialise them without a schema.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from itertools import combinations, islice
from math import comb
from typing import Iterable

import numpy as np

from .presentation import Ball, FiniteNet, as_rational, components, eps_path

__all__ = [
    "Resolution",
    "Status",
    "Verdict",
    "check_btw",
    "check_circ",
    "check_conn",
    "check_cpct",
    "check_lc",
    "check_ndegen",
    "check_ord",
    "classify_arc",
    "classify_circle",
    "replay",
]


class Status(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"


def _grid(values) -> tuple[Fraction, ...]:
    grid = tuple(as_rational(v) for v in values)
    if any(v <= 0 for v in grid):
        raise ValueError(f"grid values must be positive: {grid}")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError(f"grid must be strictly descending: {grid}")
    return grid


@dataclass(frozen=True)
class Resolution:
    """Finite instantiation of the checkers' quantifiers.

    ``n_points`` bounds which points may appear in quantified tuples and
    ball centres; paths always range over the whole net.
    ``max_path_len`` (None = unbounded) caps how long a path may be before
    it stops counting as evidence.
    """

    eps_grid: tuple = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))
    delta_grid: tuple = (Fraction(1, 4), Fraction(1, 8))
    n_points: int = 8
    max_path_len: int | None = None
    tuple_budget: int = 10_000

    def __post_init__(self):
        object.__setattr__(self, "eps_grid", _grid(self.eps_grid))
        object.__setattr__(self, "delta_grid", _grid(self.delta_grid))
        if not self.eps_grid or not self.delta_grid:
            raise ValueError("grids must be non-empty")
        if self.n_points < 1 or self.tuple_budget < 1:
            raise ValueError("n_points and tuple_budget must be positive")
        if self.max_path_len is not None and self.max_path_len < 1:
            raise ValueError("max_path_len must be positive")

    def scaled(self, factor) -> "Resolution":
        factor = as_rational(factor)
        return replace(
            self,
            eps_grid=tuple(e * factor for e in self.eps_grid),
            delta_grid=tuple(d * factor for d in self.delta_grid),
        )

    def radii_below(self, delta: Fraction) -> list[Fraction]:
        """Candidate radii for an existential "some delta' < delta"."""
        pool = {r for r in (*self.delta_grid, *self.eps_grid) if r < delta}
        pool.add(delta / 2)
        return sorted(pool, reverse=True)

    def eps_below(self, delta: Fraction) -> list[Fraction]:
        return [e for e in self.eps_grid if e < delta]


@dataclass
class Verdict:
    prop: str
    status: Status
    witness: dict
    resolution: Resolution
    args: tuple = ()

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS


class _Exhausted(Exception):
    """A path exceeded ``max_path_len``; the search cannot decide."""


def _path(net, res, x, y, eps, forbidden=()):
    w = eps_path(net, x, y, eps, forbidden)
    if w is not None and res.max_path_len is not None and len(w.points) > res.max_path_len:
        raise _Exhausted((x, y, eps))
    return w


def _tuples(net: FiniteNet, res: Resolution, size: int):
    pool = min(res.n_points, net.n)
    total = comb(pool, size)
    return islice(combinations(range(pool), size), res.tuple_budget), total > res.tuple_budget


# --- NDEGEN ---------------------------------------------------------------


def check_ndegen(net: FiniteNet, res: Resolution | None = None) -> Verdict:
    res = res or Resolution()
    apart = net.separated()
    for i in range(net.n):
        hits = np.flatnonzero(apart[i, i + 1:])
        if hits.size:
            j = i + 1 + int(hits[0])
            return Verdict("ndegen", Status.HOLDS, {"pair": [i, j], "dist": net.dist(i, j)}, res)
    return Verdict("ndegen", Status.FAILS, {"n": net.n}, res)


# --- CPCT -----------------------------------------------------------------


def _greedy_cover(net: FiniteNet, eps: Fraction, members=None, limit: int | None = None) -> list[int]:
    closed = net.within(eps, strict=False)
    todo = np.ones(net.n, dtype=bool) if members is None else members.copy()
    centers: list[int] = []
    for i in range(net.n):
        if todo[i]:
            centers.append(i)
            if limit is not None and len(centers) > limit:
                break
            todo &= ~closed[i]
    return centers


def check_cpct(net: FiniteNet, res: Resolution) -> Verdict:
    covers = []
    for eps in res.eps_grid:
        centers = _greedy_cover(net, eps, limit=res.tuple_budget)
        if len(centers) > res.tuple_budget:
            # greedy centres are pairwise more than eps apart
            return Verdict("cpct", Status.INCONCLUSIVE, {"eps": eps, "separated": centers}, res)
        covers.append({"eps": eps, "centers": centers})
    return Verdict("cpct", Status.HOLDS, {"covers": covers}, res)


# --- CONN -----------------------------------------------------------------


def _cluster_labels(net: FiniteNet, eps: Fraction) -> np.ndarray:
    near = net.within(2 * eps).astype(np.float32)
    # i ~ j when some z is within 2 eps of both
    linked = (near @ near) > 0
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    _, labels = connected_components(csr_matrix(linked), directed=False)
    return labels


def check_conn(net: FiniteNet, res: Resolution) -> Verdict:
    for eps in res.eps_grid:
        labels = _cluster_labels(net, eps)
        if labels.max(initial=0) > 0:
            first = labels == labels[0]
            u = _greedy_cover(net, eps, first)
            v = _greedy_cover(net, eps, ~first)
            return Verdict("conn", Status.FAILS, {"eps": eps, "U": u, "V": v}, res)
    return Verdict("conn", Status.HOLDS, {"eps_checked": list(res.eps_grid)}, res)


def _conn_pair_separates(net: FiniteNet, eps, u, v) -> bool:
    closed = net.within(eps, strict=False)
    covered = closed[u].any(axis=0) | closed[v].any(axis=0)
    near = net.within(2 * eps)
    return bool(covered.all()) and not bool((near[u].any(axis=0) & near[v].any(axis=0)).any())


# --- BTW / ORD ------------------------------------------------------------


def _btw(net: FiniteNet, x: int, y: int, z: int, res: Resolution) -> Verdict:
    pairs = []
    for delta in res.delta_grid:
        candidates = [(r, e) for r in res.radii_below(delta) for e in res.eps_below(delta)]
        if not candidates:
            return Verdict("btw", Status.INCONCLUSIVE, {"delta": delta, "reason": "no eps below delta"}, res, (x, y, z))
        avoiding = []
        for r, e in candidates:
            w = _path(net, res, x, z, e, [Ball(y, r, closed=True)])
            if w is None:
                pairs.append({"delta": delta, "radius": r, "eps": e})
                break
            avoiding.append({"radius": r, "eps": e, "path": list(w.points)})
        else:
            return Verdict("btw", Status.FAILS, {"delta": delta, "avoiding": avoiding}, res, (x, y, z))
    return Verdict("btw", Status.HOLDS, {"pairs": pairs}, res, (x, y, z))


def check_btw(net: FiniteNet, x: int, y: int, z: int, res: Resolution) -> Verdict:
    """Is ``y`` between ``x`` and ``z`` at this resolution?"""
    if len({x, y, z}) != 3:
        raise ValueError(f"betweenness needs three distinct points, got {(x, y, z)}")
    try:
        return _btw(net, x, y, z, res)
    except _Exhausted as exc:
        return Verdict("btw", Status.INCONCLUSIVE, {"path_bound": res.max_path_len, "query": list(exc.args[0][:2])}, res, (x, y, z))


def _arrangements3(a, b, c):
    # middle point b, a, c in turn
    return [(a, b, c), (b, a, c), (a, c, b)]


def check_ord(net: FiniteNet, res: Resolution) -> Verdict:
    tuples, capped = _tuples(net, res, 3)
    chosen = []
    undecided = None
    for triple in tuples:
        results = [check_btw(net, *arr, res) for arr in _arrangements3(*triple)]
        hit = next((r for r in results if r.holds), None)
        if hit is not None:
            chosen.append({"args": list(hit.args), "witness": hit.witness})
            continue
        if all(r.status is Status.FAILS for r in results):
            return Verdict(
                "ord",
                Status.FAILS,
                {"triple": list(triple), "arrangements": [{"args": list(r.args), "witness": r.witness} for r in results]},
                res,
            )
        undecided = undecided or list(triple)
    if undecided is not None:
        return Verdict("ord", Status.INCONCLUSIVE, {"triple": undecided}, res)
    if capped:
        return Verdict("ord", Status.INCONCLUSIVE, {"tuple_budget": res.tuple_budget}, res)
    return Verdict("ord", Status.HOLDS, {"between": chosen}, res)


# --- LC -------------------------------------------------------------------


def _lc_pair(net: FiniteNet, c: int, r: Fraction, res: Resolution):
    """Return (True, info) if some grid eps gives stable components, else (False, splits)."""
    inner = net.within(r)[c]
    outer = net.within(2 * r)[c]
    a_idx = np.flatnonzero(inner)
    labels = {e: components(net, e, outer) for e in res.eps_grid}
    splits = []
    for k, eps in enumerate(res.eps_grid[:-1]):
        coarse = labels[eps][a_idx]
        split = None
        for finer in res.eps_grid[k + 1:]:
            fine = labels[finer][a_idx]
            for comp in np.unique(coarse):
                members = a_idx[coarse == comp]
                fine_labels = fine[coarse == comp]
                bad = np.flatnonzero(fine_labels != fine_labels[0])
                if bad.size:
                    split = {"eps": eps, "finer": finer, "rep": int(members[0]), "y": int(members[bad[0]])}
                    break
            if split:
                break
        if split is None:
            reps = [int(a_idx[coarse == comp][0]) for comp in np.unique(coarse)]
            reps.sort()
            return True, {"center": c, "r": r, "eps": eps, "reps": reps}
        splits.append(split)
    return False, {"center": c, "r": r, "splits": splits}


def check_lc(net: FiniteNet, res: Resolution) -> Verdict:
    if len(res.eps_grid) < 2:
        return Verdict("lc", Status.INCONCLUSIVE, {"reason": "LC needs at least two eps values"}, res)
    centers = range(min(res.n_points, net.n))
    pairs = [(c, r) for c in centers for r in res.delta_grid]
    if len(pairs) > res.tuple_budget:
        pairs = pairs[: res.tuple_budget]
        capped = True
    else:
        capped = False
    stable = []
    for c, r in pairs:
        ok, info = _lc_pair(net, c, r, res)
        if not ok:
            return Verdict("lc", Status.FAILS, info, res)
        stable.append(info)
    if capped:
        return Verdict("lc", Status.INCONCLUSIVE, {"tuple_budget": res.tuple_budget}, res)
    return Verdict("lc", Status.HOLDS, {"balls": stable}, res)


# --- CIRC -----------------------------------------------------------------


def _cyclic_orders(a, b, c, d):
    return [(a, b, c, d), (a, b, d, c), (a, c, b, d)]


def _circ_clause1(net, order, i, delta, res):
    x = order
    for rho in res.radii_below(delta):
        balls = [Ball(x[(i + 2) % 4], rho, closed=True), Ball(x[(i + 3) % 4], rho, closed=True)]
        paths = []
        for eps in res.eps_grid:
            w = _path(net, res, x[i], x[(i + 1) % 4], eps, balls)
            if w is None:
                break
            paths.append(list(w.points))
        else:
            return {"rho": rho, "paths": paths}
    return None


def _circ_clause2(net, order, i, delta, res):
    x = order
    balls = [Ball(x[(i + 1) % 4], delta, closed=False), Ball(x[(i - 1) % 4], delta, closed=False)]
    avoiding = []
    for eps in res.eps_grid:
        w = _path(net, res, x[i], x[(i + 2) % 4], eps, balls)
        if w is None:
            return {"eps": eps}, None
        avoiding.append({"eps": eps, "path": list(w.points)})
    return None, avoiding


def _circ_order(net, order, res):
    """Check both clauses for one cyclic order; return (ok, evidence)."""
    evidence = []
    for i in range(4):
        for delta in res.delta_grid:
            one = _circ_clause1(net, order, i, delta, res)
            if one is None:
                return False, {"order": list(order), "clause": 1, "i": i, "delta": delta}
            two, avoiding = _circ_clause2(net, order, i, delta, res)
            if two is None:
                return False, {"order": list(order), "clause": 2, "i": i, "delta": delta, "avoiding": avoiding}
            evidence.append({"i": i, "delta": delta, "rho": one["rho"], "eps": two["eps"]})
    return True, {"order": list(order), "checks": evidence}


def check_circ(net: FiniteNet, res: Resolution) -> Verdict:
    tuples, capped = _tuples(net, res, 4)
    chosen = []
    try:
        for quad in tuples:
            failures = []
            for order in _cyclic_orders(*quad):
                ok, info = _circ_order(net, order, res)
                if ok:
                    chosen.append(info)
                    break
                failures.append(info)
            else:
                return Verdict("circ", Status.FAILS, {"tuple": list(quad), "orders": failures}, res)
    except _Exhausted:
        return Verdict("circ", Status.INCONCLUSIVE, {"path_bound": res.max_path_len}, res)
    if capped:
        return Verdict("circ", Status.INCONCLUSIVE, {"tuple_budget": res.tuple_budget}, res)
    return Verdict("circ", Status.HOLDS, {"orders": chosen}, res)


# --- composites -----------------------------------------------------------


def classify_arc(net: FiniteNet, res: Resolution) -> dict[str, Verdict]:
    return {
        "ndegen": check_ndegen(net, res),
        "cpct": check_cpct(net, res),
        "conn": check_conn(net, res),
        "lc": check_lc(net, res),
        "ord": check_ord(net, res),
    }


def classify_circle(net: FiniteNet, res: Resolution) -> dict[str, Verdict]:
    return {
        "ndegen": check_ndegen(net, res),
        "cpct": check_cpct(net, res),
        "conn": check_conn(net, res),
        "lc": check_lc(net, res),
        "circ": check_circ(net, res),
    }


# --- replay ---------------------------------------------------------------


def _valid_path(net, path, eps, forbidden: Iterable[Ball], start, end) -> bool:
    if not path or path[0] != start or path[-1] != end:
        return False
    if net.region_mask(forbidden)[path].any():
        return False
    near = net.within(eps)
    return all(near[a, b] for a, b in zip(path, path[1:]))


def _replay_btw(net, args, witness, res) -> Status:
    x, y, z = args
    if "pairs" in witness:
        for pair in witness["pairs"]:
            if not (pair["radius"] < pair["delta"] and pair["eps"] < pair["delta"]):
                return Status.INCONCLUSIVE
            if eps_path(net, x, z, pair["eps"], [Ball(y, pair["radius"], True)]) is not None:
                return Status.INCONCLUSIVE
        if sorted({p["delta"] for p in witness["pairs"]}) != sorted(res.delta_grid):
            return Status.INCONCLUSIVE
        return Status.HOLDS
    if "avoiding" in witness:
        delta = witness["delta"]
        wanted = {(r, e) for r in res.radii_below(delta) for e in res.eps_below(delta)}
        seen = set()
        for item in witness["avoiding"]:
            ball = [Ball(y, item["radius"], True)]
            if not _valid_path(net, item["path"], item["eps"], ball, x, z):
                return Status.INCONCLUSIVE
            seen.add((item["radius"], item["eps"]))
        return Status.FAILS if seen == wanted else Status.INCONCLUSIVE
    return Status.INCONCLUSIVE


def replay(net: FiniteNet, verdict: Verdict) -> Status:
    """Re-verify a verdict's evidence against ``net``; return the status it supports."""
    w, res, prop = verdict.witness, verdict.resolution, verdict.prop
    if prop == "ndegen":
        if "pair" in w:
            return Status.HOLDS if net.dist(*w["pair"]) > 0 else Status.INCONCLUSIVE
        return Status.FAILS if not net.separated().any() else Status.INCONCLUSIVE
    if prop == "cpct":
        if "covers" in w:
            for cover in w["covers"]:
                if not net.within(cover["eps"], strict=False)[cover["centers"]].any(axis=0).all():
                    return Status.INCONCLUSIVE
            return Status.HOLDS
        sep = w["separated"]
        closed = net.within(w["eps"], strict=False)[np.ix_(sep, sep)]
        ok = len(sep) > res.tuple_budget and not (closed & ~np.eye(len(sep), dtype=bool)).any()
        return Status.INCONCLUSIVE if ok else Status.HOLDS
    if prop == "noncompact":
        budget = w["budget"]
        if "separated" in w:
            sep = w["separated"]
            closed = net.within(w["eps"], strict=False)[np.ix_(sep, sep)]
            apart = not (closed & ~np.eye(len(sep), dtype=bool)).any()
            return Status.HOLDS if apart and len(sep) > budget else Status.INCONCLUSIVE
        for cover in w["covers"]:
            centers = cover["centers"]
            if len(centers) > budget or not net.within(cover["eps"], strict=False)[centers].any(axis=0).all():
                return Status.INCONCLUSIVE
        return Status.FAILS
    if prop == "conn":
        if "U" in w:
            return Status.FAILS if _conn_pair_separates(net, w["eps"], w["U"], w["V"]) else Status.INCONCLUSIVE
        return check_conn(net, res).status
    if prop == "btw":
        return _replay_btw(net, verdict.args, w, res)
    if prop == "ord":
        if "arrangements" in w:
            for arr in w["arrangements"]:
                if _replay_btw(net, arr["args"], arr["witness"], res) is not Status.FAILS:
                    return Status.INCONCLUSIVE
            return Status.FAILS
        if "between" in w:
            for item in w["between"]:
                if _replay_btw(net, item["args"], item["witness"], res) is not Status.HOLDS:
                    return Status.INCONCLUSIVE
            return Status.HOLDS
        return Status.INCONCLUSIVE
    if prop == "lc":
        if "splits" in w:
            ok, _ = _lc_pair(net, w["center"], w["r"], res)
            if ok:
                return Status.HOLDS
            outer = net.within(2 * w["r"])[w["center"]]
            for split in w["splits"]:
                same = components(net, split["eps"], outer)
                finer = components(net, split["finer"], outer)
                if same[split["rep"]] != same[split["y"]] or finer[split["rep"]] == finer[split["y"]]:
                    return Status.INCONCLUSIVE
            return Status.FAILS
        if "balls" in w:
            for ball in w["balls"]:
                ok, info = _lc_pair(net, ball["center"], ball["r"], res)
                if not ok:
                    return Status.FAILS
            return Status.HOLDS
        return Status.INCONCLUSIVE
    if prop == "circ":
        if "tuple" in w:
            for order in _cyclic_orders(*w["tuple"]):
                ok, _ = _circ_order(net, order, res)
                if ok:
                    return Status.INCONCLUSIVE
            return Status.FAILS
        if "orders" in w:
            for item in w["orders"]:
                ok, _ = _circ_order(net, tuple(item["order"]), res)
                if not ok:
                    return Status.INCONCLUSIVE
            return Status.HOLDS
        return Status.INCONCLUSIVE
    raise ValueError(f"unknown property {prop!r}")
