import csv
import json
import shutil
import subprocess
import sys

import pytest

from mtp_fuzzy.cli import QUICK_ITERATIONS, main, parse_observation
from mtp_fuzzy.datasets import fixture_bytes
from mtp_fuzzy.inference import CrispObservation, StructuredObservation

NS = {"left": -4, "center": -2, "right": 0}
PS = {"left": 0, "center": 2, "right": 4}


def _write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def rule(tmp_path):
    return _write(tmp_path / "rule.json", {"antecedent": NS, "consequent": PS, "universe": [-6, 6]})


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_observation():
    assert parse_observation("-1.2") == CrispObservation(-1.2)
    assert parse_observation("0.5,2,false") == StructuredObservation(0.5, 2.0, False)
    assert parse_observation("0,1,true").negated


def test_infer_worked_example(capsys, rule):
    code, out, _ = _run(capsys, ["infer", "--rule", rule, "--observe", "-1.2"])
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "ok"
    assert doc["delta"] == pytest.approx(0.8)
    assert doc["result"]["peak"] == pytest.approx(2.8, abs=1e-9)
    assert doc["centroid"] == pytest.approx(2.8, abs=0.03)
    code, out, _ = _run(capsys, ["infer", "--rule", rule, "--observe", "-2.8"])
    assert json.loads(out)["result"]["peak"] == pytest.approx(1.2, abs=1e-9)


def test_infer_identity_observation_echoes_consequent(capsys, rule):
    for mode, echoed in (("fmp", PS), ("fmt", NS)):
        code, out, _ = _run(capsys, ["infer", "--rule", rule, "--observe", "0,1,false", "--mode", mode])
        doc = json.loads(out)
        assert code == 0
        assert doc["result"]["base"] == pytest.approx(echoed)
        assert doc["shift"] == 0 and doc["exponent"] == 1 and not doc["negated"]


def test_infer_disjoint_and_bad_input(capsys, rule, tmp_path):
    code, out, _ = _run(capsys, ["infer", "--rule", rule, "--observe", "9"])
    assert code == 3 and json.loads(out)["status"] == "no_match"
    code, _, err = _run(capsys, ["infer", "--rule", rule, "--observe", "a,b"])
    assert code == 2 and err
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert _run(capsys, ["infer", "--rule", str(bad), "--observe", "1"])[0] == 2
    assert _run(capsys, ["infer", "--rule", str(tmp_path / "missing.json"), "--observe", "1"])[0] == 2
    assert _run(capsys, ["infer"])[0] == 2


def _rows(path):
    return list(csv.DictReader(open(path)))


def test_eval_classic_mamdani(capsys, tmp_path):
    rb = _write(tmp_path / "valve.json", {
        "method": "mamdani_mtp",
        # movement is width-normalized, so k = 2 maps it back to output units
        "delta_map": {"kind": "linear", "k": 2},
        "rules": [{"antecedents": [NS], "consequent": PS}],
    })
    inputs = tmp_path / "in.csv"
    inputs.write_text("label,x1\na,-1.2\nb,-2.8\n")
    out = tmp_path / "out.csv"
    code, _, _ = _run(capsys, ["eval", "--rulebase", rb, "--inputs", str(inputs), "--method", "mamdani_classic",
                               "--output", str(out)])
    rows = _rows(out)
    assert code == 0 and [r["label"] for r in rows] == ["a", "b"]
    assert [float(r["output"]) for r in rows] == pytest.approx([2, 2], abs=0.02)
    code, _, _ = _run(capsys, ["eval", "--rulebase", rb, "--inputs", str(inputs), "--output", str(out)])
    assert [float(r["output"]) for r in _rows(out)] == pytest.approx([2.8, 1.2], abs=0.03)


def test_eval_ts_mtp_matches_sugeno_for_one_input(capsys, tmp_path):
    rb = _write(tmp_path / "ts.json", {
        "method": "ts_mtp",
        "rules": [
            {"antecedents": [{"left": -3, "center": -1, "right": 1}], "coefficients": [4, 1]},
            {"antecedents": [{"left": -1, "center": 1, "right": 3}], "coefficients": [8, -0.5]},
            {"antecedents": [{"left": 0, "center": 2.5, "right": 4}], "coefficients": [1, 2]},
        ],
    })
    inputs = tmp_path / "in.csv"
    inputs.write_text("x1\n" + "\n".join(str(-2.5 + 0.25 * i) for i in range(25)) + "\n")
    outs = {}
    for method in ("ts_mtp", "sugeno"):
        out = tmp_path / f"{method}.csv"
        assert _run(capsys, ["eval", "--rulebase", rb, "--inputs", str(inputs), "--method", method,
                             "--output", str(out)])[0] == 0
        outs[method] = [float(r["output"]) for r in _rows(out)]
    assert outs["ts_mtp"] == pytest.approx(outs["sugeno"], abs=1e-9)
    out = tmp_path / "wang.csv"
    assert _run(capsys, ["eval", "--rulebase", rb, "--inputs", str(inputs), "--method", "wang_distance",
                         "--output", str(out)])[0] == 0


def test_eval_errors(capsys, tmp_path):
    rb = _write(tmp_path / "ts.json", {"method": "sugeno", "rules": [
        {"antecedents": [{"left": -1, "center": 0, "right": 1}], "coefficients": [1, 0]}]})
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert _run(capsys, ["eval", "--rulebase", rb, "--inputs", str(empty)])[0] == 2
    header_only = tmp_path / "h.csv"
    header_only.write_text("x1\n")
    assert _run(capsys, ["eval", "--rulebase", rb, "--inputs", str(header_only)])[0] == 2
    wide = tmp_path / "w.csv"
    wide.write_text("x1,x2\n1,2\n")
    assert _run(capsys, ["eval", "--rulebase", rb, "--inputs", str(wide)])[0] == 2
    miss = tmp_path / "m.csv"
    miss.write_text("x1\n0.5\n7\n")
    code, out, _ = _run(capsys, ["eval", "--rulebase", rb, "--inputs", str(miss)])
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 3 and [r["status"] for r in rows] == ["ok", "no_match"]


def test_train_zero_iterations(capsys, tmp_path):
    code, out, _ = _run(capsys, ["train", "--dataset", "precipitation", "--levels", "6", "--iterations", "0",
                                 "--repeats", "1", "--output-dir", str(tmp_path)])
    doc = json.loads(out)
    assert code == 0 and len(doc["reports"]) == 2
    for s in doc["reports"]:
        assert s["rules"] == 36 and s["iterations"] == 0 and s["speed_ratio"] == 1.0
    assert (tmp_path / "precipitation_mtp_movement_0_trace.csv").is_file()


def test_train_options(capsys, tmp_path):
    code, out, _ = _run(capsys, ["train", "--dataset", "security", "--gating", "mtp_movement", "--iterations", "3",
                                 "--repeats", "1", "--seed", "5", "--output-dir", str(tmp_path)])
    doc = json.loads(out)
    assert code == 0 and [s["method"] for s in doc["reports"]] == ["mtp_movement"]
    assert doc["reports"][0]["rules"] == 27
    assert (tmp_path / "security_mtp_movement_5_summary.json").is_file()
    assert _run(capsys, ["train", "--levels", "1", "--iterations", "0", "--output-dir", str(tmp_path)])[0] == 2
    assert _run(capsys, ["train", "--dataset", "nowhere", "--output-dir", str(tmp_path)])[0] == 2
    assert _run(capsys, ["train", "--eta", "-1", "--output-dir", str(tmp_path)])[0] == 2


def test_train_divergence_exit_code(capsys, tmp_path):
    code, _, err = _run(capsys, ["train", "--eta", "1000", "--iterations", "50", "--repeats", "1",
                                 "--output-dir", str(tmp_path)])
    assert code == 4 and "diverged" in err


def test_reproduce_quick(capsys, tmp_path):
    code, out, _ = _run(capsys, ["reproduce", "--quick", "--iterations", "20", "--repeats", "1",
                                 "--output-dir", str(tmp_path)])
    doc = json.loads(out)
    assert code == 0 and doc["quick"] and doc["iterations"] == 20
    summaries = sorted(p.name for p in tmp_path.glob("*_0_summary.json"))
    assert summaries == [
        "precipitation_mtp_movement_0_summary.json",
        "precipitation_sugeno_product_0_summary.json",
        "security_mtp_movement_0_summary.json",
        "security_sugeno_product_0_summary.json",
    ]
    saved = json.loads((tmp_path / "acceptance_summary.json").read_text())
    assert set(saved["datasets"]) == {"precipitation", "security"}
    assert isinstance(saved["passed"], bool)
    assert QUICK_ITERATIONS == 2000


def test_reproduce_data_dir(capsys, tmp_path):
    assert _run(capsys, ["reproduce", "--quick", "--data-dir", str(tmp_path / "none"),
                         "--output-dir", str(tmp_path / "r")])[0] == 2
    data = tmp_path / "data"
    data.mkdir()
    (data / "precipitation.csv").write_bytes(fixture_bytes("precipitation.csv"))
    assert _run(capsys, ["reproduce", "--quick", "--data-dir", str(data), "--output-dir", str(tmp_path / "r")])[0] == 2
    (data / "security.csv").write_bytes(fixture_bytes("security.csv"))
    assert _run(capsys, ["reproduce", "--iterations", "2", "--repeats", "1", "--data-dir", str(data),
                         "--output-dir", str(tmp_path / "r")])[0] == 0


def test_console_script(tmp_path):
    exe = shutil.which("mtp-fuzzy")
    cmd = [exe] if exe else [sys.executable, "-m", "mtp_fuzzy"]
    rule = _write(tmp_path / "rule.json", {"antecedent": NS, "consequent": PS})
    proc = subprocess.run([*cmd, "infer", "--rule", rule, "--observe", "-2.8"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["peak"] == pytest.approx(1.2)
    proc = subprocess.run([sys.executable, "-m", "mtp_fuzzy", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "reproduce" in proc.stdout
