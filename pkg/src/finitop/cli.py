"""Command-line front end: ``finitop gen|check|compactify|audit|replay|net-export``.

Exit codes: 0 for Holds or success, 2 when something Fails (the
counterexample is in the report), 3 when the best answer is Inconclusive,
1 for unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import checkers
from .checkers import Resolution, Status, replay
from .formats import (
    FormatError,
    atomic_write,
    dump_net,
    dump_presentation,
    load_net,
    load_presentation,
    load_tree,
    load_utable,
    load_wtable,
    parse_grid,
    parse_report,
    parse_time_grid,
    read_text,
    render_report,
)
from .line import CompactifiedPresentation, check_noncompact, compactify, gen_line_presentation
from .presentation import Presentation, build_net
from .sawtooth import gen_sawtooth
from .tendrils import FIRST_GAP, check_stage_invariants, circle_wrap, init_stage0, advance, run_pi4_chain, run_sigma3, trigger_at

EXIT_OK, EXIT_INPUT, EXIT_FAILS, EXIT_INCONCLUSIVE = 0, 1, 2, 3

SINGLE = {
    "ndegen": checkers.check_ndegen,
    "cpct": checkers.check_cpct,
    "conn": checkers.check_conn,
    "lc": checkers.check_lc,
    "ord": checkers.check_ord,
    "circ": checkers.check_circ,
}
COMPOSITE = {"arc": checkers.classify_arc, "circle": checkers.classify_circle}
PROPERTIES = [*SINGLE, "btw", *COMPOSITE, "real-line"]


def _status_code(statuses) -> int:
    statuses = set(statuses)
    if Status.FAILS in statuses:
        return EXIT_FAILS
    if Status.INCONCLUSIVE in statuses:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _grid(text: str):
    try:
        return parse_grid(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a comma-separated list of rationals: {text!r}") from None


# ---------------------------------------------------------------- gen


def _stage_opts(p, stages_required: bool = True):
    p.add_argument("--stages", type=int, required=stages_required, default=0)
    p.add_argument("--n-max", type=int, default=4, help="number of tendrils modelled")
    p.add_argument("--grid-cap", type=int, default=128, help="largest insertion-grid denominator")
    p.add_argument("--first-gap", type=_rational, default=FIRST_GAP)


def _stage_kwargs(a) -> dict:
    return {"n_max": a.n_max, "grid_cap": a.grid_cap, "first_gap": a.first_gap}


def cmd_gen(a) -> int:
    if a.kind == "sawtooth":
        pres = gen_sawtooth(load_wtable(read_text(a.w), a.w), a.depth)
    elif a.kind == "sigma3":
        pres = run_sigma3(load_wtable(read_text(a.w), a.w), a.stages, **_stage_kwargs(a))
    elif a.kind == "pi4":
        pres = run_pi4_chain(load_utable(read_text(a.u), a.u), a.m, a.stages, **_stage_kwargs(a))
    elif a.kind == "circle":
        tables = load_utable(read_text(a.u), a.u) if a.u else None
        pres = circle_wrap(tables, a.m, a.stages, side_depth=a.side_depth, **_stage_kwargs(a))
    else:
        try:
            grid = parse_time_grid(a.grid)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError("--grid", str(exc)) from None
        try:
            pres = gen_line_presentation(load_tree(read_text(a.tree), a.tree), grid)
        except IndexError as exc:
            raise FormatError("--grid", str(exc)) from None
    atomic_write(a.out, dump_presentation(pres))
    print(f"wrote {len(pres)} points to {a.out}")
    return EXIT_OK


# ---------------------------------------------------------------- check


def _resolution(a) -> Resolution:
    kw = {"n_points": a.n_points, "tuple_budget": a.budget, "max_path_len": a.max_path_len}
    if a.eps_grid:
        kw["eps_grid"] = a.eps_grid
    if a.delta_grid:
        kw["delta_grid"] = a.delta_grid
    try:
        return Resolution(**kw)
    except ValueError as exc:
        raise FormatError("resolution", str(exc)) from None


def _load_space(path: str):
    return load_presentation(read_text(path), path)


def _net_for(space, n: int | None):
    """Net over the first ``n`` points (all by default) plus a replay context."""
    if isinstance(space, CompactifiedPresentation):
        size = len(space) if n is None else n
        if not 1 <= size <= len(space):
            raise FormatError("--n", f"must lie in 1..{len(space)}")
        return space.net(size), {"space": "compactified", "basepoint": space.basepoint, "n": size}
    size = len(space) if n is None else n
    if not 1 <= size <= len(space):
        raise FormatError("--n", f"must lie in 1..{len(space)}")
    return build_net(space, size), {"space": "plain", "n": size}


def cmd_check(a) -> int:
    res = _resolution(a)
    if a.net:
        net, ctx = load_net(read_text(a.net), a.net), {"space": "net"}
    elif a.pres:
        space = _load_space(a.pres)
        if a.prop == "real-line" and isinstance(space, CompactifiedPresentation):
            raise FormatError(a.pres, "real-line expects an uncompactified presentation")
        net, ctx = _net_for(space, a.n)
    else:
        raise FormatError("check", "give --pres or --net")

    if a.prop == "btw":
        if not a.args or len(a.args) != 3:
            raise FormatError("--args", "btw needs three point ids")
        if any(not 0 <= i < net.n for i in a.args):
            raise FormatError("--args", f"point ids must lie in 0..{net.n - 1}")
        named = [("btw", checkers.check_btw(net, *a.args, res), ctx)]
    elif a.prop in SINGLE:
        named = [(a.prop, SINGLE[a.prop](net, res), ctx)]
    elif a.prop in COMPOSITE:
        named = [(k, v, ctx) for k, v in COMPOSITE[a.prop](net, res).items()]
    else:
        if a.net:
            raise FormatError("--net", "real-line needs a presentation, not a bare net")
        base = _prefix(space, ctx["n"])
        named = [("noncompact", check_noncompact(net, res, a.cover_budget), ctx)]
        if not 0 <= a.base < len(base):
            raise FormatError("--base", f"must lie in 0..{len(base) - 1}")
        hat = compactify(base, a.base)
        hctx = {"space": "compactified", "basepoint": a.base, "n": len(hat)}
        named += [(k, v, hctx) for k, v in checkers.classify_circle(hat.net(), res).items()]

    for name, v, _ in named:
        print(f"{name}: {v.status.value}")
    if a.report:
        body = "".join(
            render_report([(name, v)], {**c, "pres": a.pres or a.net}) for name, v, c in named
        )
        atomic_write(a.report, f"# check {a.prop}\n" + body)
    return _status_code(v.status for _, v, _ in named)


def _prefix(pres: Presentation, n: int) -> Presentation:
    return Presentation(pres.points[:n], pres.label, strict=False)


# ---------------------------------------------------------------- other commands


def cmd_compactify(a) -> int:
    space = _load_space(a.pres)
    if isinstance(space, CompactifiedPresentation):
        raise FormatError(a.pres, "already compactified")
    if not 0 <= a.base < len(space):
        raise FormatError("--base", f"must lie in 0..{len(space) - 1}")
    atomic_write(a.out, dump_presentation(compactify(space, a.base)))
    print(f"wrote compactification of {len(space)} points (infinity is id 0) to {a.out}")
    return EXIT_OK


def cmd_audit(a) -> int:
    w = load_wtable(read_text(a.w), a.w)
    state = init_stage0(a.n_max, a.grid_cap, a.first_gap)
    lines, worst = [], EXIT_OK
    for s in range(1, a.stages + 1):
        state = advance(state, trigger_at(w, s))
        report = check_stage_invariants(state)
        marks = " ".join(f"{k}:{'ok' if ok else 'FAIL'}" for k, (ok, _) in sorted(report.items.items()))
        lines.append(f"stage {s} {marks}")
        for k in report.failures():
            lines.append(f"  item {k}: {report.items[k][1]}")
            worst = EXIT_FAILS
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if a.report:
        atomic_write(a.report, text)
    return worst


def cmd_replay(a) -> int:
    entries = parse_report(read_text(a.report), a.report)
    space = None
    mismatches = 0
    for name, v, ctx in entries:
        kind = ctx.get("space", "plain")
        if a.net or kind == "net":
            path = a.net or ctx.get("pres")
            net = load_net(read_text(path), path)
        else:
            if space is None:
                path = a.pres or ctx.get("pres")
                if not path:
                    raise FormatError(a.report, "no presentation given or recorded")
                space = _load_space(path)
            if kind == "compactified" and not isinstance(space, CompactifiedPresentation):
                hat = compactify(_prefix(space, ctx["n"] - 1), ctx["basepoint"])
                net = hat.net()
            else:
                net, _ = _net_for(space, ctx.get("n"))
        got = replay(net, v)
        same = got is v.status
        mismatches += not same
        print(f"{name}: recorded {v.status.value}, replayed {got.value}{'' if same else '  MISMATCH'}")
    return EXIT_OK if mismatches == 0 else EXIT_FAILS


def cmd_net_export(a) -> int:
    space = _load_space(a.pres)
    net, _ = _net_for(space, a.n)
    atomic_write(a.out, dump_net(net))
    print(f"wrote {net.n}-point net to {a.out}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1 so that 2 keeps meaning "a property Fails"."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="finitop", description="Finite-resolution tests for arcs, circles and lines.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a presentation file")
    kinds = gen.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    p = kinds.add_parser("sawtooth", help="base segment plus the spiky graph")
    p.add_argument("--w", required=True, help="column table file")
    p.add_argument("--depth", type=int, required=True)
    p = kinds.add_parser("sigma3", help="main line with collapsing tendrils")
    p.add_argument("--w", required=True)
    _stage_opts(p)
    p = kinds.add_parser("pi4", help="chain of shrinking tendril spaces")
    p.add_argument("--u", required=True, help="file of 'table <m>' blocks")
    p.add_argument("--m", type=int, required=True, help="number of copies")
    _stage_opts(p)
    p = kinds.add_parser("circle", help="square with one side replaced by the chain")
    p.add_argument("--u", help="table blocks; omit for a straight side")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--side-depth", type=int, default=6)
    _stage_opts(p, stages_required=False)
    p = kinds.add_parser("tree-line", help="embedding of the line steered by a tree")
    p.add_argument("--tree", required=True, help="one node per line, space-separated integers")
    p.add_argument("--grid", required=True, help="'lo:hi:step' or a comma list of times (write --grid=-2:4:1/4 for a negative start)")
    for action in kinds.choices.values():
        action.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", help="run a property checker")
    p.add_argument("prop", choices=PROPERTIES)
    p.add_argument("--pres", help="presentation file")
    p.add_argument("--net", help="net file (instead of --pres)")
    p.add_argument("--n", type=int, help="net size (default: all points)")
    p.add_argument("--eps-grid", type=_grid)
    p.add_argument("--delta-grid", type=_grid)
    p.add_argument("--n-points", type=int, default=8, help="points eligible for tuples and centres")
    p.add_argument("--budget", type=int, default=10_000, help="tuple budget")
    p.add_argument("--max-path-len", type=int)
    p.add_argument("--args", type=int, nargs=3, metavar="ID", help="x y z for btw")
    p.add_argument("--base", type=int, default=0, help="basepoint for real-line")
    p.add_argument("--cover-budget", type=int, default=8, help="real-line: separated family size needed")
    p.add_argument("--report")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("compactify", help="add a point at infinity")
    p.add_argument("--pres", required=True)
    p.add_argument("--base", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compactify)

    audit = sub.add_parser("audit", help="audit a staged construction")
    what = audit.add_subparsers(dest="what", required=True, parser_class=_Parser)
    p = what.add_parser("stages", help="check the eight stage invariants after every stage")
    p.add_argument("--w", required=True)
    _stage_opts(p)
    p.add_argument("--report")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("replay", help="re-verify the witnesses in a report")
    p.add_argument("--report", required=True)
    p.add_argument("--pres")
    p.add_argument("--net")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("net-export", help="write the exact distances of a net")
    p.add_argument("--pres", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_net_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
