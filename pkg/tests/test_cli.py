import csv
import io
import json
import subprocess
import sys

import pytest

from ifam import __version__
from ifam.cli import run


def call(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def star_file(tmp_path):
    p = tmp_path / "star.txt"
    p.write_text("n 4\n1 2\n1 3\n1 4\n")
    return str(p)


@pytest.fixture
def pair_file(tmp_path):
    p = tmp_path / "pair.txt"
    p.write_text("# two singletons and their union\nn 3\n1\n2\n1 2\n")
    return str(p)


def test_profile_json(star_file):
    code, out, _ = call(["profile", star_file, "--json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["profile"] == ["1", "3", "3", "1"]
    assert rep["meta"]["version"] == __version__
    assert rep["meta"]["argv"] == ["profile", star_file, "--json"]


def test_profile_single_s_text(star_file):
    code, out, _ = call(["profile", star_file, "--s", "2"])
    assert code == 0
    assert "count: 3" in out


def test_reports_are_byte_identical(pair_file):
    argv = ["prob", pair_file, "--p", "1/2", "--mc", "3000", "--seed", "17", "--json"]
    a, b = call(argv), call(argv)
    assert a[1] == b[1]
    assert json.loads(a[1])["meta"]["seed"] == 17
    assert "wall time" in a[2]


def test_timing_flag_embeds_wall_time(star_file):
    code, out, _ = call(["profile", star_file, "--json", "--timing"])
    assert "wall_time_s" in json.loads(out)["meta"]


def test_prob_exact(pair_file):
    code, out, _ = call(["prob", pair_file, "--p", "1/3", "--json"])
    assert code == 0
    assert json.loads(out)["exact"] == "8/9"


def test_compress_and_monotone(pair_file):
    code, out, _ = call(["compress", pair_file, "--op", "ij:1,2", "--check-monotone", "--json"])
    rep = json.loads(out)
    assert code == 0
    assert rep["family"] == "n 3\n1\n2\n1 2\n"  # {2} cannot move: {1} is taken
    assert rep["monotone"]["falsification"] is False


def test_compress_uvf(tmp_path):
    p = tmp_path / "f.txt"
    p.write_text("n 6\n1\n5 6\n2\n")
    code, out, _ = call(["compress", str(p), "--op", "uvf:U=1,5;v=6;f=1-5", "--json"])
    assert code == 0
    assert json.loads(out)["family"] == "n 6\n1\n2 6\n5 6\n"


def test_search(tmp_path):
    code, out, _ = call(["search", "--n", "3", "--N", "5", "--s", "2", "--json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["max"] == "9" and rep["scanned"] == 21


def test_search_several_s():
    code, out, _ = call(["search", "--n", "3", "--N", "4", "--s", "2,3", "--json"])
    assert code == 0
    assert [r["s"] for r in json.loads(out)["reports"]] == [2, 3]


def test_search_over_budget():
    code, out, err = call(["search", "--n", "99", "--N", "5", "--s", "2"])
    assert code == 2
    assert "budget" in err
    assert out == ""


def test_layer2_modes(tmp_path):
    code, out, _ = call(["layer2", "--n", "6", "--i", "4", "--kind", "complete", "--json"])
    assert code == 0 and json.loads(out)["p2"] == 5
    code, out, _ = call(["layer2", "--n", "6", "--max", "--i", "4", "--json"])
    assert code == 0 and json.loads(out)["value"] == 6
    code, out, _ = call(["layer2", "--n", "5", "--crossover"])
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 11
    code, out, _ = call(["layer2", "--n", "21", "--bound", "--json"])
    rows = json.loads(out)["bound"]
    assert rows[-1]["n"] == 21 and rows[-1]["below_one"] and not rows[-2]["below_one"]
    p = tmp_path / "tri.txt"
    p.write_text("n 4\n1 2\n1 3\n2 3\n")
    code, out, _ = call(["layer2", "--n", "4", "--census", str(p), "--json"])
    rep = json.loads(out)
    assert code == 0 and rep["b"] == 1 and rep["a"][2] == "3"


def test_layer2_needs_a_mode():
    code, _, err = call(["layer2", "--n", "5"])
    assert code == 2 and "layer2" in err


def test_construct():
    code, out, _ = call(["construct", "--name", "construct-even", "--n", "4", "--N", "9", "--json"])
    rep = json.loads(out)
    assert code == 0 and rep["N"] == 9 and rep["kkk"]["passes"]
    code, _, err = call(["construct", "--name", "construct-even", "--n", "5"])
    assert code == 2


def test_verify_t_unique_passes():
    code, out, _ = call(["verify", "--suite", "t-unique", "--n", "4", "--s", "2,5"])
    rep = json.loads(out)
    assert code == 0
    assert rep["suite"] == "t-unique" and rep["overall"] == "pass"
    assert all(c["status"] == "pass" for c in rep["cells"])


def test_verify_other_suites():
    for argv in (
        ["verify", "--suite", "triangle", "--n", "5"],
        ["verify", "--suite", "l-stars", "--n", "7", "--r", "4", "--s", "5"],
        ["verify", "--suite", "minimal", "--n", "5"],
        ["verify", "--suite", "not-nested", "--n", "5"],
        ["verify", "--suite", "l-strict", "--n", "6", "--l", "1", "--trials", "3"],
    ):
        code, out, _ = call(argv)
        assert code == 0, argv
        assert json.loads(out)["overall"] == "pass"


def test_verify_missing_parameters():
    code, _, err = call(["verify", "--suite", "phi", "--n", "7"])
    assert code == 2 and "phi needs" in err


def test_usage_errors(tmp_path, star_file):
    assert call(["frobnicate"])[0] == 2
    assert call(["profile"])[0] == 2
    assert call(["profile", str(tmp_path / "missing.txt")])[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("n 3\n1\n1\n")
    code, _, err = call(["profile", str(bad)])
    assert code == 2 and "duplicate" in err
    assert call(["prob", star_file, "--p", "two"])[0] == 2
    assert call(["compress", star_file, "--op", "ij:1"])[0] == 2


def test_empty_set_flag(tmp_path):
    p = tmp_path / "e.txt"
    p.write_text("n 2\n0x0\n1\n")
    assert call(["profile", str(p)])[0] == 2
    code, out, _ = call(["profile", str(p), "--allow-empty", "--json"])
    assert code == 0 and json.loads(out)["profile"] == ["1", "1", "0"]


def test_console_script(star_file):
    proc = subprocess.run(
        [sys.executable, "-m", "ifam.cli", "profile", star_file, "--json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["N"] == 3


def test_verification_failure_exits_one(monkeypatch):
    import ifam.cli as cli
    from ifam.verify import VerifyReport

    def failing(n, s_list):
        rep = VerifyReport("triangle")
        rep.add({"n": n}, False, "forced")
        return rep

    monkeypatch.setattr(cli, "verify_triangle", failing)
    code, out, _ = call(["verify", "--suite", "triangle", "--n", "4"])
    assert code == 1
    assert json.loads(out)["overall"] == "fail"
