"""Text formats: presentations, nets, tables, trees and verdict reports.

Every reader raises :class:`FormatError` carrying ``file:line`` on bad
input.  Writers are deterministic and go through :func:`atomic_write`.
"""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .checkers import Resolution, Status, Verdict
from .line import CompactifiedPresentation, TreeSpec
from .presentation import FiniteNet, Presentation, SparsePoint, format_rational, net_from_distances
from .sawtooth import WTable

__all__ = [
    "FormatError",
    "atomic_write",
    "parse_rational",
    "parse_grid",
    "parse_time_grid",
    "dump_presentation",
    "load_presentation",
    "dump_net",
    "load_net",
    "dump_wtable",
    "load_wtable",
    "dump_utable",
    "load_utable",
    "load_tree",
    "dump_tree",
    "verdict_to_json",
    "verdict_from_json",
    "render_report",
    "parse_report",
    "read_text",
]


class FormatError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def atomic_write(path, text: str) -> None:
    """Write ``text`` to a sibling temp file, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    return Fraction(text)


def parse_grid(text: str) -> list[Fraction]:
    """Comma-separated rationals, e.g. ``1/2,1/4,1/8``."""
    return [parse_rational(t) for t in text.split(",") if t.strip()]


def parse_time_grid(text: str) -> list[Fraction]:
    """``lo:hi:step`` (both ends included) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range needs lo:hi:step, got {text!r}")
        lo, hi, step = (parse_rational(p) for p in parts)
        if step <= 0:
            raise ValueError("step must be positive")
        out, t = [], lo
        while t <= hi:
            out.append(t)
            t += step
        return out
    return parse_grid(text)


def _lines(text: str, source: str):
    """Yield ``(where, line)`` for lines that are neither blank nor ``#`` comments."""
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield f"{source}:{no}", line


def read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(str(path), f"cannot read: {exc.strerror}") from None


# ---------------------------------------------------------------- presentations


def _point_line(i: int, p: SparsePoint) -> str:
    body = " ".join(f"{k}:{format_rational(v)}" for k, v in p.items())
    return f"point {i} : {body}".rstrip()


def dump_presentation(pres) -> str:
    """Plain presentations, or compactified ones (base points plus basepoint)."""
    if isinstance(pres, CompactifiedPresentation):
        head = ["ambient one-point-compactification", f"basepoint {pres.basepoint}"]
        base = pres.base
    else:
        head, base = ["ambient sup-metric"], pres
    lines = head + [_point_line(i, p) for i, p in enumerate(base.points)]
    return "\n".join(lines) + "\n"


def _parse_point(where: str, line: str, expect: int) -> SparsePoint:
    head, sep, body = line.partition(":")
    words = head.split()
    if not sep or len(words) != 2 or words[0] != "point":
        raise FormatError(where, "expected 'point <id> : <coord>:<num>/<den> ...'")
    try:
        pid = int(words[1])
    except ValueError:
        raise FormatError(where, f"bad point id {words[1]!r}") from None
    if pid != expect:
        raise FormatError(where, f"point ids must be consecutive: expected {expect}, got {pid}")
    coords = {}
    for item in body.split():
        key, colon, val = item.partition(":")
        try:
            if not colon:
                raise ValueError
            k = int(key)
            if k < 0 or k in coords:
                raise ValueError
            coords[k] = parse_rational(val)
        except (ValueError, ZeroDivisionError):
            raise FormatError(where, f"bad coordinate {item!r}") from None
    return SparsePoint(coords)


def load_presentation(text: str, source: str = "<presentation>"):
    rows = list(_lines(text, source))
    if not rows:
        raise FormatError(source, "empty presentation file")
    where, header = rows[0]
    basepoint = None
    if header == "ambient sup-metric":
        body = rows[1:]
    elif header == "ambient one-point-compactification":
        if len(rows) < 2 or not rows[1][1].startswith("basepoint "):
            raise FormatError(where, "compactified presentation needs a 'basepoint <id>' line")
        try:
            basepoint = int(rows[1][1].split()[1])
        except (ValueError, IndexError):
            raise FormatError(rows[1][0], "bad basepoint") from None
        body = rows[2:]
    else:
        raise FormatError(where, f"unknown ambient header {header!r}")
    pts = [_parse_point(w, line, i) for i, (w, line) in enumerate(body)]
    try:
        pres = Presentation(pts, Path(source).stem)
    except ValueError as exc:
        raise FormatError(source, str(exc)) from None
    if basepoint is None:
        return pres
    if not 0 <= basepoint < len(pres):
        raise FormatError(rows[1][0], f"basepoint {basepoint} out of range")
    return CompactifiedPresentation(pres, basepoint)


# ---------------------------------------------------------------- nets


def dump_net(net: FiniteNet) -> str:
    lines = [f"net {net.n} {net.precision_k}"]
    for i in range(net.n):
        for j in range(i + 1, net.n):
            lines.append(f"d {i} {j} {format_rational(net.dist(i, j))}")
    return "\n".join(lines) + "\n"


def load_net(text: str, source: str = "<net>") -> FiniteNet:
    rows = list(_lines(text, source))
    if not rows:
        raise FormatError(source, "empty net file")
    where, header = rows[0]
    words = header.split()
    try:
        if len(words) != 3 or words[0] != "net":
            raise ValueError
        n, k = int(words[1]), int(words[2])
        if n < 1:
            raise ValueError
    except ValueError:
        raise FormatError(where, "expected 'net <n> <k>'") from None
    table = [[Fraction(0)] * n for _ in range(n)]
    seen = set()
    for where, line in rows[1:]:
        words = line.split()
        try:
            if len(words) != 4 or words[0] != "d":
                raise ValueError
            i, j, d = int(words[1]), int(words[2]), parse_rational(words[3])
            if not 0 <= i < j < n or d < 0 or (i, j) in seen:
                raise ValueError
        except (ValueError, ZeroDivisionError):
            raise FormatError(where, "expected 'd <i> <j> <num>/<den>' with i < j < n") from None
        seen.add((i, j))
        table[i][j] = table[j][i] = d
    if len(seen) != n * (n - 1) // 2:
        raise FormatError(source, f"net lists {len(seen)} of {n * (n - 1) // 2} distances")
    return net_from_distances(table, k=k)


# ---------------------------------------------------------------- tables


def _wtable_lines(w: WTable) -> list[str]:
    lines = [f"horizon {w.stage_horizon}"]
    for n in sorted(w.columns):
        lines.append(f"col {n} : " + " ".join(str(m) for m in sorted(w.columns[n])))
    lines += [f"infinite {n}" for n in sorted(w.infinite)]
    return [line.rstrip() for line in lines]


def dump_wtable(w: WTable) -> str:
    return "\n".join(_wtable_lines(w)) + "\n"


def _wtable_from(rows, source: str) -> WTable:
    cols: dict[int, set] = {}
    horizon, infinite = 0, set()
    for where, line in rows:
        words = line.split()
        try:
            if words[0] == "col":
                head, _, body = line.partition(":")
                hw = head.split()
                if len(hw) != 2 or not _:
                    raise ValueError
                n = int(hw[1])
                cols.setdefault(n, set()).update(int(m) for m in body.split())
            elif words[0] == "horizon" and len(words) == 2:
                horizon = int(words[1])
            elif words[0] == "infinite" and len(words) == 2:
                infinite.add(int(words[1]))
            else:
                raise ValueError
        except ValueError:
            raise FormatError(where, "expected 'col <n> : <s1> <s2> ...', 'horizon <s>' or 'infinite <n>'") from None
    try:
        return WTable(cols, horizon, frozenset(infinite))
    except ValueError as exc:
        raise FormatError(source, str(exc)) from None


def load_wtable(text: str, source: str = "<table>") -> WTable:
    return _wtable_from(_lines(text, source), source)


def dump_utable(tables: dict) -> str:
    out = []
    for m in sorted(tables):
        out.append(f"table {m}")
        out += _wtable_lines(tables[m])
    return "\n".join(out) + "\n"


def load_utable(text: str, source: str = "<tables>") -> dict[int, WTable]:
    blocks: dict[int, list] = {}
    current = None
    for where, line in _lines(text, source):
        words = line.split()
        if words[0] == "table":
            try:
                if len(words) != 2:
                    raise ValueError
                current = int(words[1])
                if current < 1 or current in blocks:
                    raise ValueError
            except ValueError:
                raise FormatError(where, "expected 'table <m>' with a new m >= 1") from None
            blocks[current] = []
        elif current is None:
            raise FormatError(where, "table lines must follow a 'table <m>' header")
        else:
            blocks[current].append((where, line))
    return {m: _wtable_from(rows, source) for m, rows in blocks.items()}


# ---------------------------------------------------------------- trees


def load_tree(text: str, source: str = "<tree>") -> TreeSpec:
    nodes = []
    for where, line in _lines(text, source):
        try:
            nodes.append(tuple(int(v) for v in line.split()))
        except ValueError:
            raise FormatError(where, "tree nodes are space-separated integers") from None
    try:
        return TreeSpec(frozenset(nodes), tuple(nodes))
    except ValueError as exc:
        raise FormatError(source, str(exc)) from None


def dump_tree(tree: TreeSpec) -> str:
    return "".join(" ".join(str(v) for v in s) + "\n" for s in tree.listing)


# ---------------------------------------------------------------- verdicts


def _encode(obj):
    if isinstance(obj, Fraction):
        return {"q": format_rational(obj)}
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, Status):
        return obj.value
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    return obj


def _decode(obj):
    if isinstance(obj, dict):
        if set(obj) == {"q"}:
            return Fraction(obj["q"])
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    return obj


def verdict_to_json(v: Verdict, context: dict | None = None) -> str:
    res = v.resolution
    doc = {
        "prop": v.prop,
        "status": v.status.value,
        "args": list(v.args),
        "resolution": {
            "eps_grid": list(res.eps_grid),
            "delta_grid": list(res.delta_grid),
            "n_points": res.n_points,
            "max_path_len": res.max_path_len,
            "tuple_budget": res.tuple_budget,
        },
        "witness": v.witness,
        "context": context or {},
    }
    return json.dumps(_encode(doc), sort_keys=True, separators=(",", ":"))


def verdict_from_json(text: str) -> tuple[Verdict, dict]:
    doc = _decode(json.loads(text))
    res = Resolution(**doc["resolution"])
    v = Verdict(doc["prop"], Status(doc["status"]), doc["witness"], res, tuple(doc["args"]))
    return v, doc.get("context", {})


def render_report(verdicts: Iterable[tuple[str, Verdict]], context: dict | None = None, title: str = "") -> str:
    """One summary line and one ``witness`` JSON line per verdict."""
    out = [f"# {title}"] if title else []
    for name, v in verdicts:
        out.append(f"verdict {name} {v.status.value}")
        out.append("witness " + verdict_to_json(v, context))
    return "\n".join(out) + "\n"


def parse_report(text: str, source: str = "<report>") -> list[tuple[str, Verdict, dict]]:
    out = []
    name = None
    for where, line in _lines(text, source):
        if line.startswith("verdict "):
            words = line.split()
            if len(words) != 3:
                raise FormatError(where, "expected 'verdict <name> <status>'")
            name = words[1]
        elif line.startswith("witness "):
            if name is None:
                raise FormatError(where, "witness without a verdict line")
            try:
                v, ctx = verdict_from_json(line[len("witness "):])
            except (ValueError, KeyError, TypeError) as exc:
                raise FormatError(where, f"bad witness block: {exc}") from None
            out.append((name, v, ctx))
            name = None
        else:
            raise FormatError(where, f"unexpected line {line[:40]!r}")
    return out
