import hashlib
import json
import subprocess
import sys

import pytest

from operadic import __version__
from operadic.cli import main, run

from cli_corpus import commands, write_corpus


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    return write_corpus(tmp_path_factory.mktemp("corpus"))


def test_homology_of_cone(files):
    code, rep, _ = run(["homology", files["cone.json"]])
    assert code == 0 and rep["status"] == "ok"
    assert rep["result"]["acyclic"] and not any(rep["result"]["betti"].values())


def test_report_metadata(files):
    code, rep, _ = run(["homology", files["cone.json"], "--max-degree", "3"])
    assert rep["tool"] == "operadic" and rep["version"] == __version__
    assert rep["flags"]["max_degree"] == 3
    raw = open(files["cone.json"], "rb").read()
    assert rep["inputs"] == [{"path": files["cone.json"],
                              "sha256": hashlib.sha256(raw).hexdigest()}]


def test_equivariance_fault_exit_1(files):
    code, rep, _ = run(["check", "coalgebra", files["bad.json"]])
    assert code == 1 and rep["status"] == "failed"
    kinds = {v["kind"] for v in rep["result"]["violations"]}
    assert "equivariance" in kinds
    assert all(v["witness"] for v in rep["result"]["violations"])


def test_envelope_matches_product(files, tmp_path):
    _, env, _ = run(["envelope", files["A.json"], files["cone.json"], "--max-degree", "4"])
    _, cof, _ = run(["cofree", files["cone.json"], "--max-degree", "4"])
    fc = tmp_path / "fc.json"
    fc.write_text(json.dumps(cof["result"]["coalgebra"]))
    _, prod, _ = run(["product", files["A.json"], str(fc), "--max-degree", "4"])
    assert env["result"]["dims"] == prod["result"]["dims"]


class _Names(dict):
    def __missing__(self, key):
        return key


@pytest.mark.parametrize("argv, code", commands(_Names()),
                         ids=lambda x: "-".join(x[:2]) if isinstance(x, list) else str(x))
def test_every_verb_exit_code(files, argv, code):
    argv = [files.get(a, a) for a in argv]
    got, rep, _ = run(argv)
    assert got == code, rep
    json.dumps(rep)


def test_lift_reports_strategy(files):
    code, rep, _ = run(["lift", files["square.json"], "--strategy", "stratified"])
    assert code == 0 and rep["result"]["strategy"] == "stratified"


def test_parse_error_names_file_and_path(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"max_degree": 2, "dims": {"1": 1, "2": 1}, "d": {"2": [["1/0"]]}}))
    code = main(["homology", str(bad)])
    err = capsys.readouterr().err
    assert code == 2
    assert str(bad) in err and "$.d.2[0][0]" in err


def test_invalid_json_reports_line(tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text('{\n "max_degree": 2,\n}')
    code, rep, _ = run(["homology", str(bad)])
    assert code == 2 and "line 3" in rep["error"]["reason"]


def test_missing_file(tmp_path):
    code, rep, _ = run(["homology", str(tmp_path / "nope.json")])
    assert code == 2 and rep["error"]["file"].endswith("nope.json")


def test_wrong_kind_is_usage_error(files):
    code, rep, _ = run(["product", files["A.json"], files["cone.json"]])
    assert code == 2 and rep["status"] == "error"


def test_sampled_family_needs_seed(files):
    code, rep, _ = run(["factorize", "smallobject", files["zero_F1.json"]])
    assert code == 2 and "--seed" in rep["error"]["reason"]


def test_bad_seed_rejected():
    assert run(["sample-family", "--seed", "-1"])[0] == 2


def test_unknown_verb():
    assert run(["frobnicate"])[0] == 2


def test_out_file(files, tmp_path):
    out = tmp_path / "r.json"
    assert main(["homology", files["cone.json"], "--out", str(out)]) == 0
    assert json.loads(out.read_text())["status"] == "ok"


def test_bad_element(files):
    code, rep, _ = run(["subcoalgebra", files["F1.json"], "--element", "2:1,1"])
    assert code == 2


def test_module_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "operadic", "homology", files["cone.json"]],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["status"] == "ok"
