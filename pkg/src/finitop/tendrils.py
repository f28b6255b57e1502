"""Staged construction of a main line with collapsing tendrils.

The state machine keeps a piecewise-linear main line on ``[-1, 1]`` and a
finite family of tendrils.  Tendril ``n`` leaves the main line at ``left``,
returns at ``right`` and both of its arcs run to ``x = 1``.  Whenever a
column ``n`` of the input table grows, tendril ``n`` and every later one
are folded into the main line and respawned much thinner, closer to 0.
Special points are logged on fixed rational grids and never move.

Only tendrils ``1..n_max`` are modelled and the insertion grids stop
refining once their denominator would exceed ``grid_cap``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .piecewise import PLFunction, diff_extremes, interpolate, strictly_below_on
from .presentation import Presentation, SparsePoint
from .sawtooth import WTable
from .spaces import dyadic_order

__all__ = [
    "Tendril",
    "LoggedPoint",
    "StageState",
    "InvariantReport",
    "init_stage0",
    "collapse_from",
    "gap",
    "spawn_tendrils",
    "prime_for",
    "nth_prime",
    "insert_points",
    "advance",
    "run_stages",
    "run_sigma3",
    "state_presentation",
    "check_stage_invariants",
    "FIRST_GAP",
    "run_pi4_chain",
    "trigger_at",
    "circle_wrap",
]

# Stand-in for the gap below a non-existent tendril 0 when everything collapses.
# Any value <= 1/2 keeps the invariants; a small one keeps respawned first
# tendrils below the resolution at which local connectedness is probed.
FIRST_GAP = Fraction(1, 16)


@dataclass(frozen=True)
class Tendril:
    n: int
    left: Fraction
    right: Fraction
    top: PLFunction
    bottom: PLFunction
    scale: Fraction
    born: int
    instance: int
    top_prime: int
    bottom_prime: int


@dataclass(frozen=True)
class LoggedPoint:
    x: Fraction
    y: Fraction
    stage: int
    source: tuple  # ("main",) or ("top"|"bottom", n, instance)

    @property
    def point(self) -> SparsePoint:
        return SparsePoint.plane(self.x, self.y)


@dataclass(frozen=True)
class CollapseEvent:
    n: int
    prior_entries: int
    interpolant: PLFunction
    old_top: PLFunction
    old_main: PLFunction


@dataclass(frozen=True)
class StageState:
    stage: int
    main: PLFunction
    tendrils: tuple
    points: tuple
    collapses: tuple  # collapse count per tendril index 1..n_max
    entries: tuple  # table entries seen per column 1..n_max
    n_max: int
    grid_cap: int
    prev_main: PLFunction | None = None
    prev_tendrils: tuple = ()
    event: CollapseEvent | None = None
    first_gap: Fraction = FIRST_GAP
    xs: frozenset = field(default=frozenset(), repr=False)

    def tendril(self, n: int) -> Tendril:
        for t in self.tendrils:
            if t.n == n:
                return t
        raise KeyError(f"tendril {n} does not exist at stage {self.stage}")

    def has_tendril(self, n: int) -> bool:
        return any(t.n == n for t in self.tendrils)

    def on_main(self, p: LoggedPoint) -> bool:
        """Main-line points and points of collapsed tendril instances."""
        return p.source[0] == "main" or (p.source[1], p.source[2]) not in {(t.n, t.instance) for t in self.tendrils}


# ---------------------------------------------------------------- primes


@lru_cache(maxsize=None)
def _primes_upto(limit: int) -> tuple:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def nth_prime(k: int) -> int:
    """The ``k``-th prime, 1-based (``nth_prime(1) == 2``)."""
    if k < 1:
        raise ValueError("k must be positive")
    limit = 64
    while True:
        ps = _primes_upto(limit)
        if len(ps) >= k:
            return ps[k - 1]
        limit *= 2


def _pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def prime_for(n: int, c: int, side: str) -> int:
    """Injective prime assignment for instance ``c`` of tendril ``n``; 2 is never used."""
    if n < 1 or c < 0 or side not in ("top", "bottom"):
        raise ValueError("need n >= 1, c >= 0 and side in {'top', 'bottom'}")
    rank = 2 * _pair(n - 1, c) + (1 if side == "bottom" else 0) + 1
    return nth_prime(rank + 1)


def _grid_exponent(p: int, stage: int, cap: int) -> int:
    e = 0
    while e < stage and p ** (e + 1) <= cap:
        e += 1
    return e


# ---------------------------------------------------------------- stages


def _stage0_tendril(n: int) -> Tendril:
    left = Fraction(-1, 2) - Fraction(1, 2 * n)
    right = Fraction(-1, 2) - Fraction(1, 2 * n + 1)
    height = Fraction(1, 2**n)
    flat = PLFunction.constant(0)
    return Tendril(
        n, left, right,
        flat.add_ramp(height, left), flat.add_ramp(height, right), height,
        born=0, instance=0, top_prime=prime_for(n, 0, "top"), bottom_prime=prime_for(n, 0, "bottom"),
    )


def init_stage0(n_max: int = 4, grid_cap: int = 128, first_gap=FIRST_GAP) -> StageState:
    """Flat main line, ``n_max`` stage-0 tendrils, and the two endpoints logged."""
    first_gap = Fraction(first_gap)
    if not 0 < first_gap <= Fraction(1, 2):
        raise ValueError("first_gap must lie in (0, 1/2]")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if grid_cap < 2:
        raise ValueError("grid_cap must be >= 2")
    pts = (
        LoggedPoint(Fraction(-1), Fraction(0), 0, ("main",)),
        LoggedPoint(Fraction(1), Fraction(0), 0, ("main",)),
    )
    return StageState(
        stage=0,
        main=PLFunction.constant(0),
        tendrils=tuple(_stage0_tendril(n) for n in range(1, n_max + 1)),
        points=pts,
        collapses=(0,) * n_max,
        entries=(0,) * n_max,
        n_max=n_max,
        grid_cap=grid_cap,
        first_gap=first_gap,
        xs=frozenset(p.x for p in pts),
    )


def collapse_from(state: StageState, n: int) -> StageState:
    """Fold tendril ``n`` and all later tendrils into the main line.

    Logged points right of ``left_n`` that sit below the bottom arc of
    tendril ``n - 1`` are joined by straight segments (ending at (1, 0)),
    and the main line becomes the pointwise max with that interpolant.
    """
    if not state.has_tendril(n):
        raise ValueError(f"cannot collapse tendril {n}: it does not exist")
    tendril = state.tendril(n)
    lo = tendril.left
    guard = state.tendril(n - 1).bottom if n > 1 else None
    nodes = {}
    cand = sorted((p for p in state.points if lo <= p.x <= 1), key=lambda p: p.x)
    ceiling = guard.sample([p.x for p in cand]) if guard is not None else [None] * len(cand)
    for p, c in zip(cand, ceiling):
        if c is None or p.y < c:
            nodes[p.x] = p.y
    nodes[lo] = state.main(lo)
    nodes[Fraction(1)] = Fraction(0)
    interp = interpolate(nodes.items())
    raised = state.main.restrict(lo, 1).maximum(interp)
    main = state.main.splice(raised)
    counts = list(state.collapses)
    for k in range(n, state.n_max + 1):
        counts[k - 1] += 1
    event = CollapseEvent(n, state.entries[n - 1], interp, tendril.top, state.main)
    return replace(
        state,
        main=main,
        tendrils=tuple(t for t in state.tendrils if t.n < n),
        collapses=tuple(counts),
        event=event,
    )


def gap(state: StageState, n: int, left=None) -> Fraction:
    """Largest height of the bottom arc of tendril ``n - 1`` above the main line.

    Taken over ``[left, 1]`` (default: that arc's whole domain); both
    functions are piecewise linear, so the sup sits on a breakpoint.  With
    no tendril below which to fit (``n == 1``) the state's ``first_gap``
    is returned.
    """
    if n == 1:
        return state.first_gap
    below = state.tendril(n - 1).bottom
    lo = below.lo if left is None else Fraction(left)
    grid = sorted({lo, Fraction(1), *below.nodes_in(lo, 1), *state.main.nodes_in(lo, 1)})
    return max(a - b for a, b in zip(below.sample(grid), state.main.sample(grid)))


def _attachment_points(state: StageState, count: int, stage: int) -> list[Fraction]:
    lo, hi = Fraction(-1, 2 * stage), Fraction(-1, 2 * stage + 2)
    inside = sorted(x for x in state.xs if lo < x < hi)
    cuts = [lo, *inside, hi]
    a, b = max(zip(cuts, cuts[1:]), key=lambda ab: (ab[1] - ab[0], -ab[0]))
    return [a + (b - a) * Fraction(i, count + 1) for i in range(1, count + 1)]


def spawn_tendrils(state: StageState, n: int, stage: int) -> StageState:
    """Respawn tendrils ``n..n_max`` hugging the main line inside the stage window."""
    if state.has_tendril(n):
        raise ValueError(f"tendril {n} is still alive; collapse it first")
    if stage < 1:
        raise ValueError("tendrils are respawned from stage 1 on")
    want = state.n_max - n + 1
    xs = _attachment_points(state, 2 * want, stage)
    g = gap(state, n, xs[0])
    new = []
    for j, k in enumerate(range(n, state.n_max + 1)):
        left, right = xs[2 * j], xs[2 * j + 1]
        scale = g / 2 ** (k + stage - 1)
        c = state.collapses[k - 1]
        # ramps normalised by 1 - x as at stage 0, so both arcs end at the same height
        new.append(
            Tendril(
                k, left, right,
                state.main.add_ramp(scale, left), state.main.add_ramp(scale, right), scale,
                born=stage, instance=c,
                top_prime=prime_for(k, c, "top"), bottom_prime=prime_for(k, c, "bottom"),
            )
        )
    return replace(state, tendrils=state.tendrils + tuple(new))


def _grid(denom: int, lo: Fraction, hi: Fraction, *, include_lo: bool) -> Iterable[Fraction]:
    t = math.ceil(lo * denom)
    while Fraction(t, denom) < hi:
        x = Fraction(t, denom)
        if x != 0 and (include_lo or x > lo):
            yield x
        t += 1


def insert_points(state: StageState, stage: int) -> StageState:
    """Log main-line dyadics and prime-grid arc points for this stage."""
    xs = set(state.xs)
    new = []
    cap = state.grid_cap

    def log_all(grid, fn, source):
        fresh = [x for x in grid if x not in xs]
        for x, y in zip(fresh, fn.sample(fresh)):
            xs.add(x)
            new.append(LoggedPoint(x, y, stage, source))

    holes = [(t.left, t.right) for t in state.tendrils]
    e = _grid_exponent(2, stage, cap)
    if e:
        grid = [x for x in _grid(2**e, Fraction(-1), Fraction(1), include_lo=False)
                if not any(a < x < b for a, b in holes)]
        log_all(grid, state.main, ("main",))
    for t in state.tendrils:
        for side, prime, arc, start in (
            ("top", t.top_prime, t.top, t.left),
            ("bottom", t.bottom_prime, t.bottom, t.right),
        ):
            e = _grid_exponent(prime, stage, cap)
            if e:
                log_all(list(_grid(prime**e, start, Fraction(1), include_lo=True)), arc, (side, t.n, t.instance))
    return replace(state, points=state.points + tuple(new), xs=frozenset(xs))


def advance(state: StageState, trigger: int | None) -> StageState:
    """One full stage: optional collapse of column ``trigger``, then insertion."""
    stage = state.stage + 1
    base = replace(state, stage=stage, prev_main=state.main, prev_tendrils=state.tendrils, event=None)
    entries = list(base.entries)
    if trigger is not None and 1 <= trigger <= state.n_max:
        base = collapse_from(base, trigger)
        base = spawn_tendrils(base, trigger, stage)
        entries[trigger - 1] += 1
    base = replace(base, entries=tuple(entries))
    return insert_points(base, stage)


def trigger_at(w: WTable, stage: int) -> int | None:
    cols = [n for n in w.entering(stage) if n >= 1]
    return cols[0] if cols else None


def run_stages(w: WTable, stages: int, *, n_max: int = 4, grid_cap: int = 128,
               first_gap=FIRST_GAP, keep_history: bool = False):
    """Run the construction; returns the final state, or all states if asked."""
    if stages < 0:
        raise ValueError("stages must be >= 0")
    state = init_stage0(n_max, grid_cap, first_gap)
    history = [state]
    for s in range(1, stages + 1):
        state = advance(state, trigger_at(w, s))
        if keep_history:
            history.append(state)
    return history if keep_history else state


def state_presentation(state: StageState, label: str = "") -> Presentation:
    return Presentation([p.point for p in state.points], label or f"tendrils stage {state.stage}")


def run_sigma3(w: WTable, stages: int, *, n_max: int = 4, grid_cap: int = 128, first_gap=FIRST_GAP) -> Presentation:
    """Logged special points after ``stages`` stages, in logging order."""
    state = run_stages(w, stages, n_max=n_max, grid_cap=grid_cap, first_gap=first_gap)
    return state_presentation(state, f"sigma3 stages {stages}")


# ---------------------------------------------------------------- audit


@dataclass
class InvariantReport:
    stage: int
    items: dict  # item number -> (passed, detail)

    @property
    def ok(self) -> bool:
        return all(passed for passed, _ in self.items.values())

    def failures(self) -> list[int]:
        return [k for k, (passed, _) in self.items.items() if not passed]


def _check_data(state: StageState) -> tuple[bool, str]:
    m = state.main
    if m(-1) != 0 or m(1) != 0:
        return False, "main line must vanish at both ends"
    ts = sorted(state.tendrils, key=lambda t: t.n)
    for t in ts:
        if not t.left < t.right < 0:
            return False, f"tendril {t.n}: attachment order"
        if t.top(t.left) != m(t.left) or t.bottom(t.right) != m(t.right):
            return False, f"tendril {t.n}: detached arc"
        if t.top(1) != t.bottom(1):
            return False, f"tendril {t.n}: arcs do not meet at x = 1"
        if not strictly_below_on(m, t.top, t.left, t.right, closed_right=True):
            return False, f"tendril {t.n}: top arc not above main line"
        if not strictly_below_on(m, t.bottom, t.right, 1):
            return False, f"tendril {t.n}: bottom arc not above main line"
        if not strictly_below_on(t.bottom, t.top, t.right, 1):
            return False, f"tendril {t.n}: bottom arc not below top arc"
    for a, b in zip(ts, ts[1:]):
        if not a.right < b.left:
            return False, f"tendrils {a.n},{b.n}: attachments overlap"
    for i, a in enumerate(ts):
        for b in ts[i + 1 :]:
            if not strictly_below_on(b.top, a.bottom, b.left, 1):
                return False, f"tendril {b.n} not below tendril {a.n}"
    return True, ""


def check_stage_invariants(state: StageState) -> InvariantReport:
    """Evaluate the eight staged invariants exactly; item -> (passed, detail)."""
    items: dict[int, tuple[bool, str]] = {}
    ev = state.event
    m = state.main

    # 1: the collapsed top arc dominates the interpolant
    if ev is None:
        items[1] = (True, "no collapse")
    else:
        lo, hi = diff_extremes(ev.old_top, ev.interpolant)
        items[1] = (lo >= 0, f"min(top - interpolant) = {lo}")

    # 2: tendril data (attachment, ordering, everything above the main line)
    items[2] = _check_data(state)

    # 3: points logged this stage are on or above the main line
    ordered = sorted(state.points, key=lambda p: p.x)
    heights = dict(zip((p.x for p in ordered), m.sample([p.x for p in ordered])))
    bad = [p for p in state.points if p.stage == state.stage and p.y < heights[p.x]]
    items[3] = (not bad, f"{len(bad)} points below the main line")

    # 4: main line never drops
    if state.prev_main is None:
        items[4] = (True, "initial stage")
    else:
        lo, _ = diff_extremes(m, state.prev_main)
        items[4] = (lo >= 0, f"min increase {lo}")

    # 5: points on the main line stay there and outside attachment intervals
    bad5 = []
    for p in state.points:
        if state.on_main(p):
            if heights[p.x] != p.y:
                bad5.append((p.x, "off line"))
            elif any(t.left < p.x < t.right for t in state.tendrils):
                bad5.append((p.x, "inside attachment"))
    items[5] = (not bad5, f"violations {bad5[:3]}")

    # 6: a tendril born at stage t rises at most 2^-t above the main line
    worst = []
    for t in state.tendrils:
        _, hi = diff_extremes(t.top, m, t.left, 1)
        if hi > Fraction(1, 2**t.born):
            worst.append((t.n, hi))
    items[6] = (not worst, f"violations {worst}")

    # 7: a collapse moves the main line by at most 2^-(n+k), k = earlier entries
    if ev is None or state.prev_main is None:
        items[7] = (True, "no collapse")
    else:
        _, jump = diff_extremes(m, ev.old_main)
        bound = Fraction(1, 2 ** (ev.n + ev.prior_entries))
        items[7] = (jump <= bound, f"jump {jump} vs bound {bound}")

    # 8: attachment points respect the window of the stage that placed them
    bad8 = []
    for t in state.tendrils:
        ceiling = Fraction(-1, 2 * t.born + 2)
        floor = Fraction(-1, 2 * t.born) if t.born else Fraction(-2)
        if not floor < t.left < t.right < ceiling:
            bad8.append(t.n)
    items[8] = (not bad8, f"violations {bad8}")
    return InvariantReport(state.stage, items)


# ---------------------------------------------------------------- chains


def _unit_box(p: SparsePoint) -> tuple[Fraction, Fraction]:
    """Native ``[-1, 1] x [0, 1]`` point to ``[0, 1] x [0, 1]``; (-1,0)->(0,0), (1,0)->(1,0)."""
    return (p[0] + 1) / 2, p[1]


def run_pi4_chain(tables, m_max: int, stages: int, *, n_max: int = 4, grid_cap: int = 128,
                  first_gap=FIRST_GAP) -> Presentation:
    """Chain of shrinking copies welded end to end, converging to ``(1, 0, ...)``.

    Copy ``m`` is the staged construction for ``tables[m]`` (an empty table
    when absent), squeezed into the ``u``-interval ``[1 - 2^(1-m), 1 - 2^-m]``
    with its height along its own coordinate ``m``.  Coordinate 0 is ``u``.
    The two chain endpoints are enumerated first.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    tables = dict(tables or {})
    pts = [SparsePoint({0: 0}), SparsePoint({0: 1})]
    seen = set(pts)
    for m in range(1, m_max + 1):
        copy = run_sigma3(tables.get(m, WTable()), stages, n_max=n_max, grid_cap=grid_cap, first_gap=first_gap)
        offset, scale = 1 - Fraction(2, 2**m), Fraction(1, 2**m)
        for p in copy.points:
            x, y = _unit_box(p)
            q = SparsePoint({0: offset + scale * x, m: scale * y})
            if q not in seen:  # the left end of copy m is the right end of copy m - 1
                seen.add(q)
                pts.append(q)
    return Presentation(pts, f"pi4 chain m<={m_max} stages {stages}")


def circle_wrap(tables, m_max: int, stages: int, *, side_depth: int = 6, n_max: int = 4,
                grid_cap: int = 128, first_gap=FIRST_GAP) -> Presentation:
    """Unit square with the side ``{0} x [0, 1]`` replaced by the chain.

    ``tables=None`` keeps that side straight.  The chain's coordinates move
    up by one so that coordinate 0 is the square's horizontal direction.
    """
    if tables is None:
        chain = [SparsePoint({0: t}) for t in dyadic_order(side_depth)]
    else:
        chain = list(run_pi4_chain(tables, m_max, stages, n_max=n_max, grid_cap=grid_cap,
                                   first_gap=first_gap).points)
    pts, seen = [], set()

    def add(p):
        if p not in seen:
            seen.add(p)
            pts.append(p)

    for t in dyadic_order(side_depth):
        add(SparsePoint({0: t}))
        add(SparsePoint({0: 1, 1: t}))
        add(SparsePoint({0: t, 1: 1}))
    for p in chain:
        add(p.remapped(lambda k: k + 1))
    return Presentation(pts, "circle wrap" + (" (straight)" if tables is None else f" m<={m_max}"))
