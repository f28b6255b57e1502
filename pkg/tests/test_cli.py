import shutil
import subprocess

import pytest

from finitop.cli import EXIT_FAILS, EXIT_INPUT, EXIT_OK, main
from finitop.formats import dump_presentation, parse_report
from finitop.spaces import dyadic_interval, rational_circle, truncated_line

COARSE = ["--eps-grid", "1/4,1/8", "--delta-grid", "1/4,1/8", "--n-points", "6"]
# betweenness needs some eps strictly below every delta
LINE = ["--eps-grid", "1/4,1/8", "--delta-grid", "1/4", "--n-points", "6"]


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "w.txt").write_text("col 1 : 1 3\ncol 2 : 2\n")
    (tmp_path / "u.txt").write_text("table 1\ncol 1 : 1\ntable 2\n")
    (tmp_path / "tree.txt").write_text("0\n0 0\n0 0 0\n")
    (tmp_path / "interval.txt").write_text(dump_presentation(dyadic_interval(6)))
    (tmp_path / "circle.txt").write_text(dump_presentation(rational_circle(64)))
    (tmp_path / "line.txt").write_text(dump_presentation(truncated_line(8, 4)))
    return tmp_path


GENS = [
    ["gen", "sawtooth", "--w", "w.txt", "--depth", "5"],
    ["gen", "sigma3", "--w", "w.txt", "--stages", "4", "--grid-cap", "32"],
    ["gen", "pi4", "--u", "u.txt", "--m", "2", "--stages", "3", "--grid-cap", "16"],
    ["gen", "circle", "--side-depth", "3"],
    ["gen", "circle", "--u", "u.txt", "--m", "2", "--stages", "2", "--grid-cap", "8"],
    ["gen", "tree-line", "--tree", "tree.txt", "--grid=-1:3:1/4"],
]


@pytest.mark.parametrize("argv", GENS, ids=lambda a: a[1])
def test_gen_byte_reproducible(work, argv):
    assert main(argv + ["--out", "a.txt"]) == EXIT_OK
    assert main(argv + ["--out", "b.txt"]) == EXIT_OK
    a = (work / "a.txt").read_bytes()
    assert a == (work / "b.txt").read_bytes()
    assert a.startswith(b"ambient sup-metric\n")


def test_check_holds_on_interval(work):
    assert main(["check", "arc", "--pres", "interval.txt", *LINE]) == EXIT_OK


def test_check_fails_and_replays(work):
    code = main(["check", "ord", "--pres", "circle.txt", *COARSE, "--report", "r.txt"])
    assert code == EXIT_FAILS
    [(name, v, ctx)] = parse_report((work / "r.txt").read_text())
    assert name == "ord" and v.status.value == "Fails" and ctx["pres"] == "circle.txt"
    assert main(["replay", "--report", "r.txt"]) == EXIT_OK


def test_replay_detects_tampering(work):
    main(["check", "ord", "--pres", "circle.txt", *COARSE, "--report", "r.txt"])
    assert main(["replay", "--report", "r.txt", "--pres", "interval.txt"]) == EXIT_FAILS


def test_btw(work):
    assert main(["check", "btw", "--pres", "interval.txt", "--args", "0", "2", "1", *LINE]) == EXIT_OK
    assert main(["check", "btw", "--pres", "interval.txt", "--args", "0", "1", "2", *LINE]) == EXIT_FAILS
    assert main(["check", "btw", "--pres", "interval.txt", "--args", "0", "1", "999", *LINE]) == EXIT_INPUT


def test_real_line_and_compactified_replay(work):
    code = main(["check", "real-line", "--pres", "line.txt", *COARSE, "--report", "r.txt"])
    assert code == EXIT_OK
    assert main(["replay", "--report", "r.txt"]) == EXIT_OK
    assert main(["check", "real-line", "--pres", "interval.txt", *COARSE]) == EXIT_FAILS


def test_compactify_then_check(work):
    assert main(["compactify", "--pres", "line.txt", "--out", "hat.txt"]) == EXIT_OK
    assert (work / "hat.txt").read_text().startswith("ambient one-point-compactification\nbasepoint 0\n")
    code = main(["check", "circ", "--pres", "hat.txt", *COARSE, "--report", "r.txt"])
    assert code == EXIT_OK
    assert main(["replay", "--report", "r.txt"]) == EXIT_OK
    assert main(["compactify", "--pres", "hat.txt", "--out", "x.txt"]) == EXIT_INPUT


def test_net_export_and_check(work):
    assert main(["net-export", "--pres", "circle.txt", "--out", "net.txt"]) == EXIT_OK
    assert main(["check", "ord", "--net", "net.txt", *COARSE, "--report", "r.txt"]) == EXIT_FAILS
    assert main(["replay", "--report", "r.txt"]) == EXIT_OK


def test_audit(work):
    assert main(["audit", "stages", "--w", "w.txt", "--stages", "5", "--grid-cap", "32", "--report", "a.txt"]) == EXIT_OK
    lines = (work / "a.txt").read_text().splitlines()
    assert len(lines) == 5 and all(line.endswith("8:ok") for line in lines)


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "ord", "--pres", "missing.txt"],
        ["check", "ord"],
        ["check", "ord", "--pres", "circle.txt", "--n", "500"],
        ["check", "ord", "--pres", "circle.txt", "--eps-grid", "1/8,1/4"],
        ["gen", "tree-line", "--tree", "tree.txt", "--grid", "0:9:1", "--out", "t.txt"],
        ["gen", "sigma3", "--w", "w.txt", "--stages", "2", "--first-gap", "2", "--out", "t.txt"],
    ],
)
def test_bad_input_exits_1(work, argv, capsys):
    assert main(argv) == EXIT_INPUT
    assert "error" in capsys.readouterr().err


def test_malformed_file_reports_location(work, capsys):
    (work / "bad.txt").write_text("ambient sup-metric\npoint 0 : 0:x\n")
    assert main(["check", "ndegen", "--pres", "bad.txt"]) == EXIT_INPUT
    assert "bad.txt:2" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [[], ["check", "nonsense"], ["gen", "sawtooth", "--w", "w.txt"]])
def test_usage_errors_exit_1(work, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == EXIT_INPUT


@pytest.mark.skipif(shutil.which("finitop") is None, reason="console script not installed")
def test_console_script(work):
    out = subprocess.run(["finitop", "check", "ord", "--pres", "circle.txt", *COARSE], capture_output=True, text=True)
    assert out.returncode == EXIT_FAILS
    assert out.stdout.strip() == "ord: Fails"
