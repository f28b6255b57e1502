"""The real line: one-point compactification and the tree embedding.

A non-compact space is a copy of the line exactly when its one-point
compactification is a circle (for locally compact spaces, which is not
checked here).  :func:`compactify` builds the compactified metric
``min(d(x, y), h(x) + h(y))`` with ``h(x) = 1 / (1 + d(base, x))``.

The second half maps a tree of integer sequences into the sup-normed
sequence space.  Integer times land on the tree nodes, and a tent bump
along a private coordinate separates consecutive nodes.  Along an infinite
branch the images of integer times converge even though the times do not,
so the image fails to be a closed copy of the line.  Exponential decay along
the time coordinate is replaced by a rational stand-in with the same shape
(see :func:`decay`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .checkers import Resolution, Status, Verdict, _greedy_cover, classify_circle
from .presentation import FiniteNet, Presentation, SparsePoint, as_rational, build_net, net_from_distances

__all__ = [
    "TreeSpec",
    "CompactifiedPresentation",
    "RealLineReport",
    "h_value",
    "compactify",
    "check_noncompact",
    "check_real_line",
    "chi",
    "x_tau",
    "psi",
    "decay",
    "embed_p",
    "gen_line_presentation",
    "path_tree",
    "antichain_tree",
]


# ---------------------------------------------------------------- compactification


def h_value(pres: Presentation, basepoint: int, x: int) -> Fraction:
    return 1 / (1 + pres.distance(basepoint, x))


@dataclass
class CompactifiedPresentation:
    """Base presentation plus a point at infinity, enumerated first (id 0).

    Base point ``i`` has id ``i + 1`` here.
    """

    base: Presentation
    basepoint: int
    _h: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if len(self.base) == 0:
            raise ValueError("cannot compactify an empty presentation")
        self.base._check_id(self.basepoint)
        self._h = [h_value(self.base, self.basepoint, i) for i in range(len(self.base))]

    INFINITY = 0

    def __len__(self) -> int:
        return len(self.base) + 1

    def h(self, i: int) -> Fraction:
        """``h`` of compactified id ``i`` (a base point)."""
        if i == self.INFINITY:
            raise ValueError("h is not defined at infinity")
        return self._h[i - 1]

    def distance(self, i: int, j: int) -> Fraction:
        if not (0 <= i < len(self) and 0 <= j < len(self)):
            raise KeyError(f"unknown point id {i if not 0 <= i < len(self) else j}")
        if i == j:
            return Fraction(0)
        if i == self.INFINITY:
            return self.h(j)
        if j == self.INFINITY:
            return self.h(i)
        return min(self.base.distance(i - 1, j - 1), self.h(i) + self.h(j))

    def net(self, n: int | None = None, k: int = 0) -> FiniteNet:
        n = len(self) if n is None else n
        if not 1 <= n <= len(self):
            raise ValueError(f"net size must lie in 1..{len(self)}")
        rows = [[self.distance(i, j) for j in range(n)] for i in range(n)]
        return net_from_distances(rows, k=k)


def compactify(pres: Presentation, basepoint: int = 0) -> CompactifiedPresentation:
    return CompactifiedPresentation(pres, basepoint)


@dataclass
class RealLineReport:
    noncompact: Verdict
    circle: dict  # name -> Verdict on the compactified net

    @property
    def verdicts(self) -> dict:
        return {"noncompact": self.noncompact, **self.circle}

    @property
    def status(self) -> Status:
        found = {v.status for v in self.verdicts.values()}
        for s in (Status.FAILS, Status.INCONCLUSIVE):
            if s in found:
                return s
        return Status.HOLDS


def check_noncompact(net: FiniteNet, res: Resolution, budget: int = 8, separation=1) -> Verdict:
    """Evidence that the space is not compact, relative to ``budget``.

    Holds when more than ``budget`` points lie pairwise further than
    ``separation`` apart, so no ``budget`` balls of that radius cover them.
    Fails, with the cover, when ``budget`` closed balls suffice.
    """
    separation = as_rational(separation)
    centers = _greedy_cover(net, separation, limit=budget)
    if len(centers) > budget:
        return Verdict("noncompact", Status.HOLDS, {"eps": separation, "separated": centers, "budget": budget}, res)
    return Verdict("noncompact", Status.FAILS, {"covers": [{"eps": separation, "centers": centers}], "budget": budget}, res)


def check_real_line(pres: Presentation, res: Resolution, *, basepoint: int = 0, n: int | None = None,
                    budget: int = 8) -> RealLineReport:
    """Non-compactness of the base plus the circle tests on its compactification.

    Local compactness is taken for granted.
    """
    n = len(pres) if n is None else n
    evidence = check_noncompact(build_net(pres, n), res, budget)
    hat = compactify(Presentation(pres.points[:n], pres.label, strict=False), basepoint)
    return RealLineReport(evidence, classify_circle(hat.net(), res))


# ---------------------------------------------------------------- trees


def _node(seq: Iterable[int]) -> tuple[int, ...]:
    return tuple(int(v) for v in seq)


@dataclass(frozen=True)
class TreeSpec:
    """A finite prefix-closed set of integer sequences and a listing of nodes.

    The listing defaults to the tree's nonempty nodes breadth first, then
    lexicographically.  A custom listing may include non-members (their
    weight is 1) but must list every prefix before its extensions.
    """

    nodes: frozenset
    listing: tuple = ()

    def __post_init__(self):
        nodes = frozenset(_node(s) for s in self.nodes)
        nodes |= {()}
        for s in nodes:
            if s[:-1] not in nodes:
                raise ValueError(f"tree is not prefix-closed: {s} lacks {s[:-1]}")
        listing = tuple(_node(s) for s in self.listing) or tuple(sorted((s for s in nodes if s), key=lambda s: (len(s), s)))
        if () in listing:
            raise ValueError("the listing starts at nonempty sequences")
        if len(set(listing)) != len(listing):
            raise ValueError("the listing repeats a sequence")
        pos = {s: i for i, s in enumerate(listing)}
        for s in listing:
            if len(s) > 1 and pos.get(s[:-1], len(listing)) > pos[s]:
                raise ValueError(f"{s} is listed before its prefix {s[:-1]}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "listing", listing)
        object.__setattr__(self, "_index", {s: i + 1 for i, s in enumerate(listing)})

    def __contains__(self, seq) -> bool:
        return _node(seq) in self.nodes

    def sigma(self, n: int) -> tuple[int, ...]:
        """The ``n``-th listed sequence, counting from 1."""
        if not 1 <= n <= len(self.listing):
            raise IndexError(f"listing has {len(self.listing)} entries, asked for {n}")
        return self.listing[n - 1]

    def index(self, seq) -> int:
        return self._index[_node(seq)]


def path_tree(depth: int) -> TreeSpec:
    """The single branch ``(0), (0, 0), ...`` of length ``depth``."""
    return TreeSpec(frozenset((0,) * k for k in range(1, depth + 1)))


def antichain_tree(width: int) -> TreeSpec:
    """``width`` pairwise incomparable nodes ``(0), (1), ...``."""
    return TreeSpec(frozenset((i,) for i in range(width)))


# coordinate layout: 0 for the decay direction, odd for tents, even for nodes
W_AXIS = 0


def tent_axis(n: int) -> int:
    return 2 * n - 1


def node_axis(tree: TreeSpec, seq) -> int:
    return 2 * tree.index(seq)


def chi(seq, tree: TreeSpec) -> Fraction:
    """Weight ``1/|seq|`` for tree nodes and 1 for non-members."""
    seq = _node(seq)
    if not seq:
        raise ValueError("the weight is undefined on the empty sequence")
    return Fraction(1, len(seq)) if seq in tree else Fraction(1)


def x_tau(seq, tree: TreeSpec) -> SparsePoint:
    """Sum of weighted unit vectors over the nonempty prefixes of ``seq``."""
    seq = _node(seq)
    if not seq:
        raise ValueError("x_tau needs a nonempty sequence")
    return SparsePoint({node_axis(tree, seq[:k]): chi(seq[:k], tree) for k in range(1, len(seq) + 1)})


def psi(n: int, t) -> Fraction:
    """Tent of height 1 on ``[n, n + 1]`` peaking at ``n + 1/2``."""
    t = as_rational(t)
    if t <= n or t >= n + 1:
        return Fraction(0)
    return 2 * (t - n) if t <= n + Fraction(1, 2) else 2 * (n + 1 - t)


def decay(t) -> Fraction:
    """Rational stand-in for ``exp(-t)``: positive, strictly decreasing, 1 at 0."""
    t = as_rational(t)
    return 1 / (1 + t) if t >= 0 else 1 - t


def embed_p(t, tree: TreeSpec) -> SparsePoint:
    t = as_rational(t)
    w = SparsePoint({W_AXIS: decay(t)})
    if t <= 0:
        return w
    if t <= 1:
        return x_tau(tree.sigma(1), tree).scaled(t) + w
    n = t.numerator // t.denominator
    if n == t:
        # p(n) needs only the n-th node
        return x_tau(tree.sigma(n), tree) + w
    a = x_tau(tree.sigma(n), tree).scaled(n + 1 - t)
    b = x_tau(tree.sigma(n + 1), tree).scaled(t - n)
    return a + b + SparsePoint({tent_axis(n): psi(n, t)}) + w


def gen_line_presentation(tree: TreeSpec, t_grid: Sequence) -> Presentation:
    """Images of the grid times, first occurrences kept, in grid order."""
    seen, ts = set(), []
    for t in t_grid:
        t = as_rational(t)
        if t not in seen:
            seen.add(t)
            ts.append(t)
    return Presentation([embed_p(t, tree) for t in ts], f"tree line {len(ts)} times")
