import json
import math

import pytest

from avoidlab.cli import EXIT_INVALID, EXIT_OK, EXIT_USAGE, chain_seeds, consistency_value, main, replay_manifest
from avoidlab.constructions import BandSet
from avoidlab.geometry import BoxUnion, ConfigKind, boxunion_avoids
from avoidlab.search import bandset_avoids
from avoidlab.setfile import read_csv, read_set


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_construct_then_verify(work, capsys):
    assert main(["construct", "--R", "64"]) == EXIT_OK
    assert (work / "AR64.txt").exists() and (work / "AR64.txt.manifest.json").exists()
    assert main(["verify", "--set", "AR64.txt", "--out", "v.csv"]) == EXIT_OK
    header, rows = read_csv("v.csv", ["check", "status", "detail"])
    assert [r[1] for r in rows] == ["PASS", "PASS"]


def test_verify_rejects_tampered_set_with_witness(work, capsys):
    (work / "bad.txt").write_text("bounds 0 8 0 8\nband 4 4.125\nband 2.95 3.05\n")
    assert main(["verify", "--set", "bad.txt"]) == EXIT_INVALID
    assert "witness" in capsys.readouterr().out


def test_verify_box_files(work):
    (work / "one.txt").write_text("bounds 0 4 0 4\nbox 0 1 0 1\n")
    assert main(["verify", "--set", "one.txt"]) == EXIT_INVALID  # a unit square holds small corners
    (work / "thin.txt").write_text("bounds 0 4 0 4\nbox 0 4 0 0.1\n")
    assert main(["verify", "--set", "thin.txt"]) == EXIT_OK


@pytest.mark.parametrize("argv", [
    ["verify", "--set", "missing.txt"],
    ["verify"],
    ["nonsense"],
    ["report", "--inputs", "x.csv", "--const", "cubic=1"],
])
def test_usage_errors(work, argv):
    assert main(argv) == EXIT_USAGE


def test_mixed_file_is_usage_error(work):
    (work / "m.txt").write_text("bounds 0 8 0 8\nband 4 4.125\nbox 0 1 0 1\n")
    assert main(["verify", "--set", "m.txt"]) == EXIT_USAGE


def test_manifest_replay_reproduces_outputs(work):
    assert main(["search", "--R", "4", "--h", "0.5", "--steps", "200", "--seed", "3", "--out", "s.txt"]) == EXIT_OK
    doc = json.loads((work / "s.txt.manifest.json").read_text())
    assert doc["seed"] == 3 and doc["exit_status"] == 0 and len(doc["outputs"]) == 2
    assert all(replay_manifest(work / "s.txt.manifest.json").values())


def test_search_outputs_avoiding_sets(work):
    assert main(["search", "--R", "6", "--h", "0.5", "--steps", "300", "--chains", "3", "--svg", "s.svg"]) == EXIT_OK
    S = read_set("search_R6.txt")
    assert isinstance(S, BoxUnion) and boxunion_avoids(S, ConfigKind.corner())
    header, rows = read_csv("search_R6.history.csv", ["step", "move", "accepted"])
    assert len(rows) == 300
    assert (work / "s.svg").read_text().startswith("<svg")
    assert main(["search", "--R", "8", "--init", "bands", "--h", "0.0625", "--steps", "30", "--out", "b.txt"]) == EXIT_OK
    B = read_set("b.txt")
    assert isinstance(B, BandSet) and bandset_avoids(B)


def test_density_table_and_report(work, capsys):
    assert main(["search", "--R-list", "8,16", "--steps", "10", "--out", "d.csv"]) == EXIT_OK
    header, rows = read_csv("d.csv", ["R", "best_measure", "band_measure", "delta_hat"])
    assert float(rows[0][2]) == 0.509765625
    assert main(["report", "--inputs", "d.csv", "--const", "RlogR=0.125", "--out", "r.csv"]) == EXIT_OK
    header, rows = read_csv("r.csv", ["source", "R", "measure", "delta_hat", "consistency"])
    assert len(rows) == 2
    assert (work / "r.svg").exists()


def test_report_single_point_and_no_constants(work):
    (work / "d.csv").write_text("R,best_measure,band_measure,delta_hat\n16,8.0,2.17,0.03125\n")
    assert main(["report", "--inputs", "d.csv"]) == EXIT_OK
    _, rows = read_csv("report.csv")
    assert float(rows[0][4]) == pytest.approx(consistency_value(8 / 256, 16))


def test_report_rejects_malformed_csv(work):
    (work / "bad.csv").write_text("R,best_measure\n16\n")
    assert main(["report", "--inputs", "bad.csv"]) == EXIT_USAGE
    (work / "odd.csv").write_text("foo,bar\n1,2\n")
    assert main(["report", "--inputs", "odd.csv"]) == EXIT_USAGE


def test_graham_and_transfer(work):
    assert main(["graham", "--full", "24", "--r", "2", "--N", "3", "--out", "g.csv"]) == EXIT_OK
    assert main(["graham", "--full", "24", "--r", "2", "--N", "4"]) == EXIT_INVALID  # extraction fails
    assert main(["construct", "--R", "64"]) == EXIT_OK
    status = main(["transfer", "--set", "AR64.txt", "--n", "8", "--T", "0.5", "--seed", "7", "--csv", "t.csv"])
    assert status in (EXIT_OK, EXIT_INVALID)
    header, rows = read_csv("t.csv", ["achieved"])
    assert (rows[0][header.index("achieved")] == "1") == (status == EXIT_OK)


def test_numeric_commands(work):
    assert main(["energy", "--disk", "1", "--h", "0.0625", "--out", "e.csv"]) == EXIT_OK
    assert main(["multiplier", "--n", "5", "--out", "m.csv"]) == EXIT_OK
    assert main(["construct", "--R", "8"]) == EXIT_OK
    assert main(["form-eval", "--set", "AR8.txt", "--kind", "N0", "--h", "0.125"]) == EXIT_OK


def test_helpers(monkeypatch):
    assert chain_seeds(1, 4) == chain_seeds(1, 4) and len(set(chain_seeds(1, 4))) == 4
    assert math.isnan(consistency_value(0.0, 10))
    assert consistency_value(1.0, math.e) == pytest.approx(1.0)
