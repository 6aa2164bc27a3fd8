import json
import subprocess
import sys

import pytest

from hlslock import benchmarks
from hlslock.cli import main
from hlslock.minic import parse
from hlslock.minic.ast import LockedCond, LockedConst, LockedOp, walk
from hlslock.report import validate_report

GA_SMALL = ["--population", "12", "--max-generations", "6"]


def bench(name):
    return str(benchmarks.path(name))


def lock(tmp_path, name, *extra, out="out"):
    target = tmp_path / out
    code = main(["lock", "--src", bench(name), "--out", str(target), "--tests", "random:20:0",
                 "--wrong-keys", "20", *extra])
    assert code == 0
    return target


def test_analyze_bubblesort_row(capsys):
    assert main(["analyze", "--src", bench("bubblesort")]) == 0
    assert "0 ctrl, 11 op, 4 const, 139 bits" in capsys.readouterr().out


def test_analyze_json_and_empty_body(tmp_path, capsys):
    src = tmp_path / "e.c"
    src.write_text("void top(void) { }\n")
    assert main(["analyze", "--src", str(src), "--json"]) == 0
    info = json.loads(capsys.readouterr().out)
    assert (info["branches"], info["operations"], info["constants"], info["full_bits"]) == (0, 0, 0, 0)
    assert info["points"] == []


def test_lock_full_transforms_every_point(tmp_path):
    out = lock(tmp_path, "toy", "--engine", "full")
    report = json.loads((out / "report.json").read_text())
    validate_report(report)
    locked = parse((out / "locked.c").read_text())
    n_locked = sum(isinstance(n, (LockedOp, LockedConst, LockedCond)) for n in walk(locked))
    assert n_locked == 8
    assert report["selected"]["key_bits"] == 70
    assert report["cost"]["overhead"] > 0
    assert (out / "trace.csv").read_text().startswith("generation,best,mean,std")


def test_lock_is_reproducible(tmp_path):
    a = lock(tmp_path, "toy_mix", *GA_SMALL, "--seed", "4", out="a")
    b = lock(tmp_path, "toy_mix", *GA_SMALL, "--seed", "4", out="b")
    for name in ("report.json", "locked.c", "trace.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    report = json.loads((a / "report.json").read_text())
    assert report["wall_time_s"] is None
    assert "jobs" not in report["config"]["dse"]


def test_eval_reproduces_selected_entropy(tmp_path, capsys):
    out = lock(tmp_path, "toy_mix", *GA_SMALL)
    report = json.loads((out / "report.json").read_text())
    capsys.readouterr()
    common = ["--src", bench("toy_mix"), "--tests", "random:20:0", "--wrong-keys", "20", "--json"]
    assert main(["eval", *common, "--solution", str(out / "report.json")]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["H"] == report["selected"]["H"]
    zero = tmp_path / "zero.json"
    zero.write_text("[0, 0, 0, 0, 0]")
    assert main(["eval", *common, "--solution", str(zero)]) == 0
    assert json.loads(capsys.readouterr().out)["H"] == 0.0


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"src": bench("toy_sel"), "engine": "full", "tests": "random:10:1",
                               "wrong_keys": 5, "dse": {"population": 8}}))
    out = tmp_path / "o"
    assert main(["lock", "--config", str(cfg), "--engine", "tao", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["search"]["engine"] == "tao"
    assert report["config"]["tests"] == "random:10:1"
    assert report["config"]["dse"]["population"] == 8


def test_key_fraction(tmp_path):
    out = lock(tmp_path, "toy", "--engine", "tao", "--key-frac", "50")
    report = json.loads((out / "report.json").read_text())
    assert report["key"]["length"] == 35
    assert report["selected"]["key_bits"] <= 35


@pytest.mark.parametrize("argv", [
    ["analyze", "--src", "/nonexistent.c"],
    ["lock", "--engine", "full"],
])
def test_failures_exit_nonzero(argv, capsys):
    assert main(argv) == 1
    assert "hlslock: error" in capsys.readouterr().err


def test_parse_failure_exits_nonzero(tmp_path, capsys):
    src = tmp_path / "bad.c"
    src.write_text("int top(int a) { return a + ; }\n")
    assert main(["analyze", "--src", str(src)]) == 1
    assert "bad.c:1:29: syntax error" in capsys.readouterr().err


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "hlslock.cli", "--version"], capture_output=True, text=True)
    assert done.returncode == 0
    assert done.stdout.startswith("hlslock ")
