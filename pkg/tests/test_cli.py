import csv
import io
import json
import subprocess
import sys

import pytest

from ffrestrict import cli


def run(argv, monkeypatch=None):
    buf = io.StringIO()
    code = cli.run(argv, stdout=buf)
    return code, buf.getvalue()


@pytest.fixture
def setfile(tmp_path):
    path = tmp_path / "A.txt"
    path.write_text("# small set\n1,2,0\n0,0,0\n1,1,1\n3,4,2\n1,2,0\n", encoding="utf-8")
    return path


def strip_timing(doc):
    doc = dict(doc)
    doc.pop("wall_clock")
    doc.pop("timestamp")
    return doc


def test_energy_command(setfile):
    code, out = run(["energy", "--p", "5", "--d", "4", "--set", str(setfile)])
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "energy"
    assert doc["payload"]["n"] == 4
    assert doc["payload"]["total"] >= 16
    assert any("duplicate" in w for w in doc["warnings"])
    assert len(doc["input_digests"][str(setfile)]) == 64
    assert doc["version"]


def test_byte_identical_modulo_timing(setfile):
    a = json.loads(run(["energy", "--p", "5", "--set", str(setfile)])[1])
    b = json.loads(run(["energy", "--p", "5", "--set", str(setfile)])[1])
    assert strip_timing(a) == strip_timing(b)


def test_rectangles_and_incidence(setfile, tmp_path):
    code, out = run(["rectangles", "--p", "5", "--set", str(setfile)])
    doc = json.loads(out)["payload"]
    assert code == 0
    assert doc["ordinary"] + doc["semi_degenerate"] + doc["degenerate"] == doc["nontrivial"]
    planes = tmp_path / "planes.txt"
    planes.write_text("0,0,1,0,3\n1,0,0,1\n", encoding="utf-8")
    code, out = run(["incidence", "--p", "5", "--set", str(setfile), "--planes", str(planes)])
    pp = json.loads(out)["payload"]["point_plane"]
    assert code == 0
    # (0,0,0) on z=0 (x3), (1,2,0) on z=0 (x3) and x=1, (1,1,1) on x=1
    assert pp["incidences"] == 3 + 3 + 1 + 1 + 0


def test_verify_writes_files(tmp_path):
    out = tmp_path / "res"
    code, _ = run(["verify", "--bound", "par-energy-d4", "--p", "5", "--seed", "42", "--n", "10",
                   "--out", str(out)])
    assert code == 0
    stem = "verify_p5_d4_s42"
    doc = json.loads((out / f"{stem}.json").read_text())
    lines = (out / f"{stem}.jsonl").read_text().splitlines()
    assert len(lines) == 10 == doc["payload"]["count"]
    rows = list(csv.DictReader((out / f"{stem}.csv").open()))
    assert rows[0]["bound"] == "par-energy-d4"


def test_verify_threads_identical(tmp_path):
    docs = []
    for t in ("1", "4"):
        code, out = run(["verify", "--bound", "stein-tomas", "--p", "5", "--d", "3", "--n", "12",
                         "--seed", "7", "--threads", t])
        assert code == 0
        doc = json.loads(out)
        docs.append(doc["payload"])
    assert docs[0] == docs[1]


def test_verify_max_c_exit_2():
    code, _ = run(["verify", "--bound", "par-energy-d4", "--p", "5", "--n", "4", "--max-c", "1e-6"])
    assert code == 2


def test_sharpness_command():
    code, out = run(["sharpness", "--d", "4", "--q", "3", "--primes", "3,7,11"])
    doc = json.loads(out)["payload"]
    assert code == 0
    assert all(abs(r["ratio"] - 1) < 1e-9 for r in doc["rows"])
    code, out = run(["sharpness", "--d", "4", "--qs", "2.5,3", "--primes", "3,7", "--format", "csv"])
    assert out.splitlines()[0] == "p,q,ratio,closed_form"


def test_sharpness_trend_failure_exit_2():
    # a single prime cannot show an increase below the critical exponent
    code, _ = run(["sharpness", "--d", "4", "--qs", "2.5", "--primes", "7,7"])
    assert code == 2


def test_lower_bound_command(tmp_path):
    code, out = run(["lower-bound", "--primes", "31,61", "--out", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "lower-bound_p31-61_d4_s0.json").read_text())
    assert [r["slice_energies_min"] for r in doc["payload"]["rows"]] == [233, 848]
    code, _ = run(["lower-bound", "--primes", "31,61", "--min-slope", "5"])
    assert code == 2


def test_extremize_command():
    code, out = run(["extremize", "--p", "5", "--d", "4", "--q", "3", "--budget", "50", "--seed", "2"])
    assert code == 0 and json.loads(out)["payload"]["best_ratio"] >= 1 - 1e-9


def test_transform_command(tmp_path):
    f = tmp_path / "f.txt"
    f.write_text("0,0,1,0\n", encoding="utf-8")
    code, out = run(["transform", "--p", "3", "--func", str(f)])
    doc = json.loads(out)["payload"]
    assert code == 0 and doc["nonzero"] == 9
    code, out = run(["transform", "--p", "3", "--func", str(f), "--mode", "extension",
                     "--out", str(tmp_path / "o")])
    assert code == 0
    assert (tmp_path / "o" / "transform_p3_d3_s0.txt").exists()


def test_env_override(monkeypatch, setfile):
    monkeypatch.setenv("FFRESTRICT_P", "7")
    monkeypatch.setenv("FFRESTRICT_SEED", "11")
    code, out = run(["rectangles", "--set", str(setfile)])
    doc = json.loads(out)
    assert code == 0 and doc["params"]["p"] == 7 and doc["params"]["seed"] == 11
    code, out = run(["rectangles", "--p", "5", "--set", str(setfile)])
    assert json.loads(out)["params"]["p"] == 5


@pytest.mark.parametrize("argv", [
    ["energy", "--p", "4", "--set", "x"],
    ["energy", "--p", "5", "--set", "/no/such/file"],
    ["energy", "--set", "x"],
    ["transform", "--p", "5", "--func", "/no/such"],
])
def test_input_errors_exit_1(argv, monkeypatch):
    monkeypatch.delenv("FFRESTRICT_P", raising=False)
    assert run(argv)[0] == 1


def test_malformed_set_exit_1(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("1,2\nfoo\n", encoding="utf-8")
    assert run(["energy", "--p", "5", "--set", str(bad)])[0] == 1


def test_size_cap_exit_1(tmp_path):
    f = tmp_path / "f.txt"
    f.write_text("0,0,0,1,0\n", encoding="utf-8")
    assert run(["transform", "--p", "5", "--func", str(f), "--size-cap", "10"])[0] == 1


@pytest.mark.parametrize("argv", [["bogus"], ["energy", "--nope"], ["verify", "--bound", "x"]])
def test_usage_errors_exit_1(argv):
    proc = subprocess.run([sys.executable, "-m", "ffrestrict.cli", *argv], capture_output=True)
    assert proc.returncode == 1
