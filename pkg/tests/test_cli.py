"""Command-line interface: outputs, formats and exit codes."""
import json
import subprocess
import sys

import pytest

from dunklball import cli
from dunklball.orthobasis import BasisRankError


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_moments_example(capsys):
    code, out, _ = run(["moments", "--dim", "1", "--alpha", "0", "--gamma", "0", "--index", "2"], capsys)
    assert code == 0 and out == "0.3333333333333333\n"


def test_moments_rational_and_theta(capsys):
    code, out, _ = run(["moments", "--dim", "1", "--index", "2", "--backend", "rational"], capsys)
    assert code == 0 and out.strip() == "1/3"
    code, out, _ = run(["moments", "--dim", "1", "--index", "0", "--theta", "1"], capsys)
    assert code == 0 and float(out) == pytest.approx(0.5)
    code, _, err = run(["moments", "--dim", "1", "--index", "0", "--theta", "1", "--backend", "rational"], capsys)
    assert code == 2 and "rational" in err and "usage" in err


def test_sharpness_example(capsys):
    code, out, _ = run(["sharpness", "--dim", "1", "--alpha", "0", "--gamma", "0", "--n-max", "12"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "n,ratio_closed,ratio_poly,normalized_h1_error"
    row = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert row["n"] == "2" and row["ratio_closed"] == "1.4285714285714286"
    assert len(lines) == 12


def test_verify_exit_codes(capsys):
    args = ["verify", "--dim", "2", "--alpha", "1/2", "--gamma", "1/4,-1/2", "--max-degree", "4",
            "--backend", "rational", "--seed", "7", "--draws", "3", "--check", "prop_diff_shift_1",
            "--check", "weak_SL"]
    code, out, _ = run(args, capsys)
    doc = json.loads(out)
    assert code == 0 and [d["check_id"] for d in doc] == ["prop_diff_shift_1", "weak_SL"]
    assert all(d["pass"] and d["max_residual"] == 0 for d in doc)
    bad = args[:-4] + ["--check", "no_such_check"]
    code, out, _ = run(bad, capsys)
    assert code == 1 and json.loads(out)[0]["pass"] is False


def test_basis_print(capsys):
    code, out, _ = run(["basis", "--dim", "2", "--alpha", "0", "--gamma", "0,0", "--max-degree", "2", "--print"],
                       capsys)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 6
    assert lines[0] == "k=0 i=0: 1.0 0 0"
    assert lines[1] == "k=1 i=0: 2.0 1 0" and lines[2] == "k=1 i=1: 2.0 0 1"


def test_basis_json(capsys):
    code, out, _ = run(["basis", "--dim", "2", "--max-degree", "2", "--backend", "rational"], capsys)
    doc = json.loads(out)
    assert code == 0 and [len(lvl) for lvl in doc["levels"]] == [1, 2, 3]
    assert doc["levels"][1][0] == {"norm2": "1/4", "terms": [["1", 1, 0]]}


def test_converge_functions(tmp_path, capsys):
    code, out, _ = run(["converge", "--dim", "2", "--fn", "abs-power:axis=0,theta=1", "--N", "2,4,6"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "N,err_l2,err_h1,norm_l2,norm_h1" and len(lines) == 4
    errs = [float(line.split(",")[1]) for line in lines[1:]]
    assert errs[0] > errs[1] > errs[2] > 0
    poly = tmp_path / "u.txt"
    poly.write_text("1 2 0\n-1/2 0 2\n3 1 1\n")
    code, out, _ = run(["converge", "--dim", "2", "--backend", "rational", "--fn", f"poly:{poly}", "--r", "2",
                        "--N", "0,1,2", "--format", "json"], capsys)
    recs = json.loads(out)
    assert code == 0 and recs[-1]["err_l2"] == 0 and recs[0]["err_l2"] > 0 and recs[0]["r"] == 2
    code, out, _ = run(["converge", "--dim", "2", "--fn", "radial-jacobi:1,0.5", "--N", "0,2"], capsys)
    assert code == 0 and out.splitlines()[2].split(",")[1] == "0"


def test_output_file(tmp_path, capsys):
    target = tmp_path / "m.txt"
    code, out, _ = run(["moments", "--dim", "1", "--index", "2", "--output", str(target)], capsys)
    assert code == 0 and out == "" and target.read_text() == "0.3333333333333333\n"


@pytest.mark.parametrize("argv", [
    ["nonsense"],
    ["moments", "--dim", "2", "--gamma", "0,0,0", "--index", "2,0"],
    ["moments", "--dim", "1", "--alpha", "-1", "--index", "2"],
    ["moments", "--dim", "2", "--index", "2"],
    ["moments", "--dim", "1", "--alpha", "abc", "--index", "0"],
    ["converge", "--dim", "2", "--fn", "spline:1", "--N", "2"],
    ["converge", "--dim", "2", "--fn", "abs-power:axis=5,theta=1", "--N", "2"],
    ["converge", "--dim", "2", "--fn", "abs-power:axis=0,theta=1", "--N", "4,2"],
    ["converge", "--dim", "2", "--fn", "abs-power:axis=0,theta=1", "--N", "2", "--r", "2"],
    ["converge", "--dim", "2", "--fn", "abs-power:axis=0,theta=1", "--N", "2", "--backend", "rational"],
    ["converge", "--dim", "2", "--fn", "poly:/no/such/file", "--N", "2"],
    ["sharpness", "--dim", "1", "--n-max", "1"],
    ["verify", "--dim", "1", "--draws", "0"],
    ["moments", "--dim", "1", "--index", "2", "--backend", "f32"],
])
def test_flag_errors_exit_2(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2 and out == "" and "usage" in err


def test_rank_failure_exit_3(monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise BasisRankError(7, 1e-15)
    monkeypatch.setattr(cli, "build_basis", boom)
    code, out, err = run(["basis", "--dim", "2", "--max-degree", "8"], capsys)
    assert code == 3 and out == "" and "degree 7" in err


def test_byte_identical_float_output():
    args = [sys.executable, "-m", "dunklball", "converge", "--dim", "2", "--alpha", "0.5", "--gamma", "0.5,0",
            "--fn", "abs-power:axis=1,theta=1.5,signed", "--N", "1,3,5,7"]
    first = subprocess.run(args, capture_output=True, check=True).stdout
    second = subprocess.run(args, capture_output=True, check=True).stdout
    assert first == second and first.startswith(b"N,err_l2,err_h1")
