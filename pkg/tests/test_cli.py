"""End-to-end CLI tests: every subcommand, exit-code convention, JSON
byte-determinism, and certificate round-trips through ``verify``.

Exit codes: 0 = success or SATISFIED, 2 = a verified violation
certificate was produced, 1 = errors (including usage errors).
"""

import json

import pytest

from tarskicert import cli

CORE_DOT = """digraph core {
  rankdir=LR;
  0 [shape=doublecircle];
  1 [shape=circle];
  0 -> 1 [label="x"];
  0 -> 0 [label="y"];
  1 -> 0 [label="x"];
}
"""


def run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_core_dot_golden(capsys):
    code, out, err = run(capsys, ["core", "--gens", "x^2, y", "--dot"])
    assert code == 0
    assert out == CORE_DOT


def test_core_text_summary(capsys):
    code, out, _ = run(capsys, ["core", "--gens", "x^2, y"])
    assert code == 0
    assert out == "vertices: 2\nrank: 2\nindex: infinite\n"


def test_core_json(capsys):
    code, out, _ = run(capsys, ["core", "--gens", "x^2, y", "--json"])
    assert code == 0
    data = json.loads(out)
    assert data["vertices"] == 2
    assert data["base"] == 0
    assert {e["label"] for e in data["edges"]} == {"x", "y"}


def test_member(capsys):
    code, out, _ = run(capsys, ["member", "--gens", "x^2", "--word", "x"])
    assert (code, out) == (0, "false\n")
    code, out, _ = run(capsys, ["member", "--gens", "x^2", "--word", "x^2"])
    assert (code, out) == (0, "true\n")


def test_config_overrides_flags(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"word": "x^2"}')
    code, out, _ = run(capsys, ["member", "--gens", "x^2", "--word", "x",
                                "--config", str(cfg)])
    assert (code, out) == (0, "true\n")
    bad = tmp_path / "bad.json"
    bad.write_text('{"no-such-flag": 1}')
    code, _, err = run(capsys, ["member", "--gens", "x^2", "--word", "x",
                                "--config", str(bad)])
    assert code == 1
    assert "no-such-flag" in err


def test_intersect(capsys):
    code, out, _ = run(capsys, ["intersect", "--gens", "x^2, y",
                                "--gens2", "x^3"])
    assert code == 0
    assert out == "vertices: 6\nrank: 1\nindex: infinite\n"


def test_rank_index_nielsen(capsys):
    code, out, _ = run(capsys, ["rank", "--gens", "x y, y x"])
    assert (code, out) == (0, "2\n")
    code, out, _ = run(capsys, ["index", "--gens", "x^2, y, x y x^-1"])
    assert (code, out) == (0, "2\n")
    # with only x appearing the inferred alphabet has rank 1, where x^2
    # has index 2; an explicit two-letter alphabet makes it infinite
    code, out, _ = run(capsys, ["index", "--gens", "x^2"])
    assert (code, out) == (0, "2\n")
    code, out, _ = run(capsys, ["index", "--gens", "x^2",
                                "--alphabet", "x y"])
    assert (code, out) == (0, "infinite\n")
    code, out, _ = run(capsys, ["nielsen", "--gens", "x, x y"])
    assert (code, out) == (0, "x, y\n")


def test_zassenhaus(capsys):
    comm = "x y x^-1 y^-1"
    code, out, _ = run(capsys, ["zassenhaus", "--p", "2", "--n", "2",
                                "--word", comm])
    assert (code, out) == (0, "true\n")
    code, out, _ = run(capsys, ["zassenhaus", "--p", "2", "--n", "4",
                                "--word", comm])
    assert (code, out) == (0, "false\n")
    code, out, _ = run(capsys, ["zassenhaus", "--p", "2", "--n", "2",
                                "--word", comm, "--json"])
    data = json.loads(out)
    assert data == {"kind": "filtration-membership", "member": True,
                    "n": 2, "p": 2, "word": comm}


def test_findm_text_and_json(capsys, tmp_path):
    code, out, _ = run(capsys, ["findm", "--n", "1", "--p", "2"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "m(1) = 9 at p = 2 (scanned 23437 words of length <= 6)"
    assert lines[1] == "  m = 2 fails: witness x x"

    cert = tmp_path / "findm.json"
    code, out, _ = run(capsys, ["findm", "--n", "1", "--p", "2", "--json",
                                "--cert-out", str(cert)])
    assert code == 0
    data = json.loads(out)
    assert data["kind"] == "findm"
    assert data["m"] == 9
    assert data["checkedCount"] == 23437
    assert len(data["failures"]) == 7
    assert json.loads(cert.read_text()) == data

    code, out, _ = run(capsys, ["verify", "--cert", str(cert)])
    assert code == 0
    assert "re-verified" in out


def test_expand_json_golden(capsys):
    code, out, _ = run(capsys, ["expand", "--gens", "x^2, y",
                                "--radius", "2", "--json"])
    assert code == 0
    data = json.loads(out)
    assert data["vertices"] == 4
    assert data["frontier"] == [2, 3]
    assert data["reps"] == ["1", "x", "x y", "x y^-1"]
    assert data["provenance"] == {
        "alphabet": ["x", "y"], "budget": 1048576,
        "gens": ["x x", "y"], "oracle": "fg", "radius": 2}


def test_expand_window_cert_round_trip(capsys, tmp_path):
    path = tmp_path / "window.json"
    code, _, _ = run(capsys, ["expand", "--gens", "x^2, y", "--radius", "2",
                              "--json", "--out", str(path)])
    assert code == 0
    code, out, _ = run(capsys, ["verify", "--cert", str(path)])
    assert code == 0
    assert "window re-verified" in out


def test_hall_violation_and_round_trip(capsys, tmp_path):
    cert = tmp_path / "hall.json"
    code, out, _ = run(capsys, [
        "paradox", "hall", "--gens", "", "--alphabet", "x",
        "--s1", "1, x", "--s2", "1, x, x", "--radius", "6",
        "--pool", "0,1,2,3,4", "--out", str(cert)])
    assert code == 2
    data = json.loads(cert.read_text())
    assert data["kind"] == "hall_violation"
    assert data["data"]["unionSize"] == 6
    assert data["data"]["required"] == 10

    code, out, _ = run(capsys, ["verify", "--cert", str(cert)])
    assert code == 0
    assert "union 6 < 10" in out


def test_hall_satisfied(capsys):
    code, out, _ = run(capsys, [
        "paradox", "hall", "--gens", "", "--alphabet", "x y",
        "--s1", "1, x", "--s2", "1, y", "--radius", "4",
        "--pool-size", "8"])
    assert (code, out) == (0, "SATISFIED\n")


def test_hall_exhaustive_agrees(capsys, tmp_path):
    argv = ["paradox", "hall", "--gens", "", "--alphabet", "x",
            "--s1", "1, x", "--s2", "1, x, x", "--radius", "6",
            "--pool", "0,1,2,3,4"]
    code, fast, _ = run(capsys, argv)
    assert code == 2
    code, slow, _ = run(capsys, argv + ["--exhaustive"])
    assert code == 2
    assert json.loads(slow)["data"]["unionSize"] < \
        json.loads(slow)["data"]["required"]


def test_powercycles_and_round_trip(capsys, tmp_path):
    cert = tmp_path / "pc.json"
    code, out, _ = run(capsys, ["paradox", "powercycles", "--a", "x",
                                "--b", "y", "--c", "z", "--r", "4",
                                "--out", str(cert)])
    assert code == 2
    data = json.loads(cert.read_text())
    assert data["kind"] == "hall_violation"
    assert data["window"]["oracle"] == "power_cycle_core"
    assert data["data"]["unionSize"] == 12
    assert data["data"]["required"] == 13
    # two-digit vertex ids must sort numerically in the canonical JSON
    assert data["data"]["A1"] == sorted(data["data"]["A1"])

    code, out, _ = run(capsys, ["verify", "--cert", str(cert)])
    assert code == 0
    assert "union 12 < 13" in out


def test_folner(capsys, tmp_path):
    cert = tmp_path / "folner.json"
    code, out, _ = run(capsys, ["paradox", "folner", "--s1", "0;1",
                                "--s2", "0;1", "--out", str(cert)])
    assert code == 2
    data = json.loads(cert.read_text())
    assert data["data"]["space"] == "lattice"
    assert data["data"]["unionSize"] == 3
    assert data["data"]["required"] == 4

    code, out, _ = run(capsys, ["verify", "--cert", str(cert)])
    assert code == 0

    code, out, _ = run(capsys, ["paradox", "folner", "--s1", "0",
                                "--s2", "1", "--mmax", "1"])
    assert code == 0
    assert "SATISFIED" in out


def test_tower_run_and_round_trips(capsys, tmp_path):
    out_dir = tmp_path / "tower"
    code, out, _ = run(capsys, ["tower", "--n", "1", "--tuples", "1",
                                "--radius", "4", "--out", str(out_dir)])
    assert code == 0
    for name in ("report.txt", "decomposition.json", "lower_report.json",
                 "spec.json"):
        assert (out_dir / name).exists()
    report = (out_dir / "report.txt").read_text()
    assert "ok" in report.lower()

    code, vout, _ = run(capsys, ["verify", "--cert",
                                 str(out_dir / "decomposition.json")])
    assert code == 0
    assert "re-verified" in vout


def test_tower_deterministic(capsys, tmp_path):
    dirs = []
    for name in ("a", "b"):
        d = tmp_path / name
        code, _, _ = run(capsys, ["tower", "--n", "1", "--tuples", "1",
                                  "--radius", "4", "--out", str(d)])
        assert code == 0
        dirs.append(d)
    for name in ("report.txt", "decomposition.json", "lower_report.json",
                 "spec.json"):
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()


def test_filtertower_run_and_doubling_round_trip(capsys, tmp_path):
    out_dir = tmp_path / "ftower"
    code, out, _ = run(capsys, ["filtertower", "--p", "2", "--nmax", "1",
                                "--pairs", "2", "--radius", "4",
                                "--out", str(out_dir)])
    assert code == 0
    for name in ("report.txt", "report.json", "core.json", "doubling.json"):
        assert (out_dir / name).exists()
    report = json.loads((out_dir / "report.json").read_text())
    assert report["data"]["ok"] is True
    doubling = json.loads((out_dir / "doubling.json").read_text())
    assert doubling["kind"] == "doubling_cert"

    code, vout, _ = run(capsys, ["verify", "--cert",
                                 str(out_dir / "doubling.json")])
    assert code == 0
    assert "re-verified" in vout


def test_stdout_json_deterministic(capsys):
    argv = ["expand", "--gens", "x^2, y", "--radius", "3", "--json"]
    _, out1, _ = run(capsys, argv)
    _, out2, _ = run(capsys, argv)
    assert out1 == out2


def test_error_exits(capsys, tmp_path):
    code, _, err = run(capsys, ["member", "--gens", "x^2",
                                "--word", "q!!"])
    assert code == 1
    assert "error:" in err
    code, _, err = run(capsys, ["nonsense"])
    assert code == 1
    code, _, err = run(capsys, ["verify", "--cert",
                                str(tmp_path / "missing.json")])
    assert code == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, ["verify", "--cert", str(bad)])
    assert code == 1
    code, _, err = run(capsys, ["zassenhaus", "--p", "4", "--n", "2",
                                "--word", "x"])
    assert code == 1
    assert "not prime" in err


def test_out_writes_file_not_stdout(capsys, tmp_path):
    path = tmp_path / "core.dot"
    code, out, _ = run(capsys, ["core", "--gens", "x^2, y", "--dot",
                                "--out", str(path)])
    assert code == 0
    assert out == ""
    assert path.read_text() == CORE_DOT
