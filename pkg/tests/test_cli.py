import json
import subprocess
import sys

import numpy as np
import pytest

from sigalg.cli import main
from sigalg.paths import write_csv
from sigalg.rtree import random_heighted_tree


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


@pytest.fixture
def csvdir(tmp_path):
    files = {
        "segment.csv": "t,x1,x2\n0,0,0\n1,1,2\n",
        "lpath.csv": "t,x1,x2\n0,0,0\n1,1,0\n2,1,1\n",
        "two.csv": "t,x1,x2\n0,0,0\n0.5,0.8,0.3\n1,0.2,1\n",
        "plateau.csv": "t,x1,x2\n0,0,0\n1,1,0\n1,1,0.5\n2,1,1\n3,0.5,-1\n",
        "three.csv": "t,x1,x2,x3\n0,0,0,0\n0.5,1,0.3,-0.2\n1,0.2,1,0.4\n",
        "empty.csv": "",
        "bad.csv": "t,x1\n0,1\n1,x\n",
    }
    for name, text in files.items():
        (tmp_path / name).write_text(text)
    return tmp_path


@pytest.fixture
def posets(tmp_path):
    tree = random_heighted_tree(np.random.default_rng(4), 10)
    docs = {
        "tree.json": tree.to_json(),
        "diamond.json": {
            "nodes": list("vabcd"),
            "root": "v",
            "relation": [["v", "a"], ["v", "b"], ["a", "c"], ["b", "c"], ["a", "d"], ["b", "d"]],
            "alpha": {"v": 0, "a": 1, "b": 1, "c": 2, "d": 2},
        },
        "nonmono.json": {"nodes": ["v", "a", "b"], "root": "v", "parent": {"a": "v", "b": "a"}, "alpha": {"v": 0, "a": 2, "b": 1}},
    }
    for name, doc in docs.items():
        (tmp_path / name).write_text(json.dumps(doc))
    (tmp_path / "broken.json").write_text('{"nodes": [')
    return tmp_path


# -- sig ----------------------------------------------------------------------------


def test_sig_single_segment(capsys, csvdir):
    code, rep = run(capsys, "sig", csvdir / "segment.csv", "--level", 2)
    assert code == 0 and rep["schema_version"] == 1
    levels = rep["result"]["levels"]
    np.testing.assert_allclose(levels[1], [1.0, 2.0])
    np.testing.assert_allclose(levels[2], [0.5, 1.0, 1.0, 2.0])


def test_sig_l_path(capsys, csvdir):
    code, rep = run(capsys, "sig", csvdir / "lpath.csv", "-N", 2)
    assert code == 0
    assert rep["result"]["levels"][2] == [0.5, 1.0, 0.0, 0.5]


@pytest.mark.parametrize("name", ["empty.csv", "bad.csv", "missing.csv"])
def test_sig_input_errors(capsys, csvdir, name):
    code = main(["sig", str(csvdir / name)])
    assert code == 2
    err = capsys.readouterr().err
    assert "input error" in err
    if name == "bad.csv":
        assert "row 3, column 2" in err


def test_sig_capacity(capsys, tmp_path):
    (tmp_path / "wide.csv").write_text("t," + ",".join(f"x{i}" for i in range(10)) + "\n0" + ",0" * 10 + "\n1" + ",1" * 10 + "\n")
    assert main(["sig", str(tmp_path / "wide.csv"), "--level", "8"]) == 3


def test_bad_flags_are_input_errors(capsys, csvdir):
    assert main(["sig", str(csvdir / "lpath.csv"), "--level", "0"]) == 2
    assert main(["check", str(csvdir / "lpath.csv"), "--tol", "-1"]) == 2


# -- check --------------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["segment.csv", "lpath.csv", "two.csv", "three.csv"])
def test_check_passes(capsys, csvdir, name):
    code, rep = run(capsys, "check", csvdir / name)
    assert code == 0 and rep["pass"]
    assert set(rep["result"]) == {"norm_symmetry", "pushforward", "reversal", "reparametrization"}
    assert all(c["residual"] < 1e-9 for c in rep["result"].values())


def test_check_plateau_collapse(capsys, csvdir):
    code, rep = run(capsys, "check", csvdir / "plateau.csv")
    assert code == 0
    assert rep["result"]["reparametrization"]["collapsed_rows"] == 1
    assert rep["result"]["reparametrization"]["pass"]


def test_check_unreachable_tolerance(capsys, csvdir):
    code, rep = run(capsys, "check", csvdir / "three.csv", "--tol", 1e-18)
    assert code == 1 and not rep["pass"]
    assert any(not c["pass"] for c in rep["result"].values())


# -- hmap ---------------------------------------------------------------------------------


def test_hmap_two_segment_structure(capsys, csvdir):
    code, rep = run(capsys, "hmap", csvdir / "two.csv", "--level", 2, "--depth", 2)
    rows = rep["result"]["profiles"]
    assert [r["profile"] for r in rows] == [[1], [2], [1, 1], [1, 2], [2, 1], [2, 2]]
    assert all(r["chen_residual"] < 1e-8 for r in rows)
    assert rep["result"]["group_like"]["residual"] < 1e-7
    for r in rows[:2]:
        assert r["closed_form_residual"] < 1e-12 and r["oracle_residual"] < 1e-12


@pytest.mark.xfail(strict=True, reason="composite trapezoid at q=64 is accurate to ~1e-5, not 1e-6; see ledger")
def test_hmap_two_segment_all_residuals_below_1e6(capsys, csvdir):
    code, rep = run(capsys, "hmap", csvdir / "two.csv", "--level", 2, "--depth", 2)
    assert all(r["oracle_residual"] < 1e-6 for r in rep["result"]["profiles"])
    assert code == 0


def test_hmap_oracle_tolerance_flag(capsys, csvdir):
    code, rep = run(capsys, "hmap", csvdir / "two.csv", "--tol", 1e-4)
    assert code == 0 and rep["result"]["thresholds"]["oracle"] == 1e-4


def test_hmap_depth_three_in_three_dimensions(capsys, csvdir):
    main(["hmap", str(csvdir / "three.csv"), "--level", "3", "--depth", "3", "--tol", "1e-3"])
    captured = capsys.readouterr()
    rep = json.loads(captured.out)
    assert len(rep["result"]["profiles"]) == 3 + 9 + 27
    assert "sigalg hmap:" in captured.err and " s" in captured.err


def test_hmap_capacity(capsys, csvdir):
    assert main(["hmap", str(csvdir / "two.csv"), "--level", "4"]) == 3
    assert main(["hmap", str(csvdir / "two.csv"), "--depth", "4"]) == 3


# -- tree-check ----------------------------------------------------------------------------


def test_tree_check_valid(capsys, posets):
    code, rep = run(capsys, "tree-check", posets / "tree.json")
    assert code == 0 and rep["result"]["certified"]
    assert {c["name"] for c in rep["result"]["certificates"]} == {"triangle", "zero_hyperbolic", "gromov_product", "four_point"}


def test_tree_check_diamond(capsys, posets):
    code, rep = run(capsys, "tree-check", posets / "diamond.json")
    assert code == 1
    v3 = [v for v in rep["result"]["violations"] if v["condition"] == 3]
    assert v3 and v3[0]["witness"] == ["c", "d", ["a", "b"]]


def test_tree_check_non_monotone(capsys, posets):
    code, rep = run(capsys, "tree-check", posets / "nonmono.json")
    assert code == 1
    assert rep["result"]["violations"] == [
        {"condition": 4, "message": "alpha does not increase from lower to upper node", "witness": ["a", "b"]}
    ]


def test_tree_check_malformed(capsys, posets):
    assert main(["tree-check", str(posets / "broken.json")]) == 2


# -- fuzz and determinism -------------------------------------------------------------------


def test_fuzz_emits_corpus(capsys, tmp_path):
    code, rep = run(capsys, "fuzz", "--count", 6, "--seed", 3, "--emit", tmp_path / "corpus")
    assert code == 0 and rep["result"]["failures"] == []
    assert len(list((tmp_path / "corpus").glob("*.csv"))) == 6
    assert all(1 <= r["segments"] <= 8 for r in rep["result"]["runs"])


def test_fuzz_fixed_dimension(capsys):
    code, rep = run(capsys, "fuzz", "--count", 3, "--dim", 4, "--level", 3)
    assert code == 0 and all(r["dim"] == 4 for r in rep["result"]["runs"])


def test_repeat_runs_are_byte_identical(tmp_path, csvdir):
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}.json"
        main(["check", str(csvdir / "two.csv"), "--seed", "5", "--out", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point(csvdir):
    proc = subprocess.run(
        [sys.executable, "-m", "sigalg", "sig", str(csvdir / "lpath.csv"), "--level", "2"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["levels"][2] == [0.5, 1.0, 0.0, 0.5]
