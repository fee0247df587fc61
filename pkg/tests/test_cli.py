import json

import numpy as np
import pytest

from mds53.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, run


@pytest.fixture
def source(tmp_path):
    path = tmp_path / "input.bin"
    path.write_bytes(np.random.default_rng(3).bytes(50_000))
    return path


@pytest.fixture
def env(monkeypatch, tmp_path):
    monkeypatch.setenv("MDS53_DIR", str(tmp_path / "cluster"))
    monkeypatch.setenv("MDS53_REPORT_DIR", str(tmp_path / "reports"))
    return tmp_path


def test_show_plan(capsys):
    assert run(["show-plan", "--node", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "reconstruct 0x00 0x01 0x02 0x02" in out
    assert "bandwidth 4" in out


def test_usage_errors(capsys, monkeypatch):
    monkeypatch.delenv("MDS53_DIR", raising=False)
    assert run(["show-plan", "--node", "7"]) == EXIT_USAGE
    assert run(["frobnicate"]) == EXIT_USAGE
    assert run(["fail", "--node", "2"]) == EXIT_USAGE  # no directory anywhere
    assert run(["search-params", "--field", "gf3"]) == EXIT_USAGE
    assert run(["reconstruct", "--dir", "x", "--out", "y", "--nodes", "1,1,2"]) == EXIT_USAGE
    assert run(["show-plan", "--node", "1", "--params", "nonsense"]) == EXIT_USAGE


def test_full_cycle(env, source, capsys):
    out_file = env / "rebuilt.bin"
    assert run(["encode", "--in", str(source), "--symbol-size", "1024"]) == EXIT_OK
    assert run(["fail", "--node", "2"]) == EXIT_OK
    capsys.readouterr()
    assert run(["repair", "--node", "2", "--json"]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["downloaded_bytes"] * 3 == summary["full_decode_bytes"] * 2
    assert run(["reconstruct", "--out", str(out_file), "--nodes", "2,4,5"]) == EXIT_OK
    assert out_file.read_bytes() == source.read_bytes()


def test_repair_with_plan_file(env, source, tmp_path, capsys):
    assert run(["encode", "--in", str(source)]) == EXIT_OK
    capsys.readouterr()
    assert run(["show-plan", "--node", "5"]) == EXIT_OK
    plan_file = tmp_path / "plan5.txt"
    plan_file.write_text(capsys.readouterr().out)
    assert run(["fail", "--node", "5"]) == EXIT_OK
    assert run(["repair", "--node", "5", "--plan", str(plan_file)]) == EXIT_OK


def test_data_failures(env, source):
    assert run(["reconstruct", "--out", str(env / "x")]) == EXIT_FAILURE  # nothing encoded yet
    assert run(["encode", "--in", str(source)]) == EXIT_OK
    for node in ("1", "2", "3"):
        assert run(["fail", "--node", node]) == EXIT_OK
    assert run(["repair", "--node", "1"]) == EXIT_FAILURE
    assert run(["reconstruct", "--out", str(env / "x")]) == EXIT_FAILURE


def test_search_params(tmp_path, capsys):
    out = tmp_path / "gf4.txt"
    assert run(["search-params", "--field", "gf4", "--out", str(out)]) == EXIT_OK
    assert out.read_text().splitlines() == [
        "q=4;poly=0x7;lambda=2;mu=3;theta=3;eta=2",
        "q=4;poly=0x7;lambda=3;mu=2;theta=2;eta=3",
    ]


def test_verify_exhaustive(env, capsys):
    assert run(["verify", "--field", "gf4", "--exhaustive", "--json"]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["passed"] is True
    assert summary["tuples"] == 2
    assert summary["messages"] == 4096
    assert (env / "reports" / "verify_gf4.txt").exists()


def test_verify_invalid_params_fails(env):
    args = ["verify", "--field", "gf4", "--params", "q=4;poly=0x7;lambda=2;mu=3;theta=2;eta=3"]
    assert run(args) == EXIT_FAILURE


def _plan_file(tmp_path, capsys, node, edit):
    capsys.readouterr()
    assert run(["show-plan", "--node", str(node)]) == EXIT_OK
    path = tmp_path / f"plan{node}.txt"
    path.write_text(edit(capsys.readouterr().out))
    return path


def test_tampered_plan_is_refused(env, source, tmp_path, capsys):
    assert run(["encode", "--in", str(source)]) == EXIT_OK
    original = (env / "cluster" / "node3.seg").read_bytes()
    plan = _plan_file(
        tmp_path, capsys, 3,
        lambda text: text.replace("reconstruct 0x00 0x01 0x02 0x02", "reconstruct 0x01 0x00 0x00 0x01"),
    )
    assert run(["fail", "--node", "3"]) == EXIT_OK
    assert run(["repair", "--node", "3", "--plan", str(plan)]) == EXIT_FAILURE
    assert (env / "cluster" / "node3.seg").read_bytes() == b""
    assert run(["repair", "--node", "3"]) == EXIT_OK
    assert (env / "cluster" / "node3.seg").read_bytes() == original


@pytest.mark.parametrize("prefix", ["download 4", "cancel 1", "reconstruct"])
def test_incomplete_plan_file(env, source, tmp_path, capsys, prefix):
    assert run(["encode", "--in", str(source)]) == EXIT_OK
    plan = _plan_file(
        tmp_path, capsys, 3,
        lambda text: "".join(line + "\n" for line in text.splitlines() if not line.startswith(prefix)),
    )
    assert run(["fail", "--node", "3"]) == EXIT_OK
    assert run(["repair", "--node", "3", "--plan", str(plan)]) == EXIT_FAILURE


def test_bad_symbol_sizes(env, source, monkeypatch):
    assert run(["encode", "--in", str(source), "--symbol-size", "0"]) == EXIT_USAGE
    monkeypatch.setenv("MDS53_SYMBOL_SIZE", "abc")
    assert run(["encode", "--in", str(source)]) == EXIT_USAGE
    assert run(["encode", "--in", str(source), "--symbol-size", "64"]) == EXIT_OK
