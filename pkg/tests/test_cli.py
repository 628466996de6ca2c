import json
import math
import subprocess
import sys

import numpy as np
import pytest

from conftest import pair_frame
from scalekit import UnitNormFrame
from scalekit.cli import SCAN_HEADER, main
from scalekit.core import write_frame


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_identity(tmp_path, capsys):
    write_frame(UnitNormFrame(np.eye(3)), tmp_path / "id.json")
    code, out, _ = run(capsys, "analyze", str(tmp_path / "id.json"))
    assert code == 0
    assert json.loads(out)["scalable"] is True


def test_analyze_pair(tmp_path, capsys):
    write_frame(pair_frame(math.pi / 8), tmp_path / "pair.csv")
    code, out, _ = run(capsys, "analyze", str(tmp_path / "pair.csv"), "--json")
    rep = json.loads(out)
    assert code == 0 and rep["scalable"] is False
    assert rep["cone_distance"] == pytest.approx(0.8164966, abs=1e-7)


def test_analyze_text(tmp_path, capsys):
    write_frame(pair_frame(math.pi / 8), tmp_path / "pair.json")
    code, out, _ = run(capsys, "analyze", str(tmp_path / "pair.json"), "--text")
    assert code == 0 and "scalable         no" in out


def test_analyze_malformed(tmp_path, capsys):
    (tmp_path / "bad.json").write_text("{not json")
    code, _, err = run(capsys, "analyze", str(tmp_path / "bad.json"))
    assert code == 2 and err


def test_analyze_missing_file(tmp_path, capsys):
    code, _, _ = run(capsys, "analyze", str(tmp_path / "nope.json"))
    assert code == 2


def test_bad_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["scan", "--m-list", "x", "--n", "4", "--out", "o.csv"])
    assert exc.value.code == 2


def test_scan_single_row(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code, _, _ = run(capsys, "scan", "--m-list", "4", "--n", "4", "--count", "1", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(SCAN_HEADER)
    assert len(lines) == 2
    row = [float(v) for v in lines[1].split(",")]
    d, v, lo, hi, dl, du = row[3:]
    if d < 1:
        assert lo - 1e-5 <= v ** (4 / 4) <= hi + 1e-5
    assert dl <= du


def test_scan_deterministic(tmp_path, capsys):
    args = ["scan", "--m-list", "6,11", "--n", "4", "--count", "5", "--seed", "7"]
    run(capsys, *args, "--out", str(tmp_path / "a.csv"))
    run(capsys, *args, "--out", str(tmp_path / "b.csv"))
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_scan_float_format(tmp_path, capsys):
    run(capsys, "scan", "--m-list", "6", "--n", "3", "--count", "2", "--out", str(tmp_path / "s.csv"))
    for line in (tmp_path / "s.csv").read_text().splitlines()[1:]:
        for field in line.split(",")[3:]:
            assert float(field) == float(format(float(field), ".17g"))


def test_scan_unwritable(tmp_path, capsys):
    code, _, _ = run(capsys, "scan", "--m-list", "4", "--n", "4", "--count", "1",
                     "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 4


def test_prob_zero_regime(capsys):
    code, out, _ = run(capsys, "prob", "--m", "5", "--n", "3", "--trials", "200")
    est = json.loads(out)
    assert code == 0 and est["hits"] == 0 and est["estimate"] == 0


def test_prob_2d(capsys):
    code, out, _ = run(capsys, "prob", "--m", "4", "--n", "2", "--trials", "20000", "--seed", "11")
    est = json.loads(out)
    assert abs(est["estimate"] - 0.5) <= 3 * est["stderr"]


def test_prob_envelope_csv(tmp_path, capsys):
    code, out, _ = run(capsys, "prob", "--m", "10", "--n", "4", "--trials", "300",
                       "--csv", str(tmp_path / "p.csv"))
    est = json.loads(out)
    assert est["lower_bound"] - 3 * est["stderr"] <= est["estimate"]
    assert est["estimate"] <= est["upper_bound"] + 3 * est["stderr"]
    header = (tmp_path / "p.csv").read_text().splitlines()[0]
    assert header == "m,n,trials,hits,estimate,stderr,lower_bound,upper_bound"


def test_construct_identity(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, text, _ = run(capsys, "construct", "--spectrum", "1,1,1,1", "--m", "4", "--out", str(out))
    assert code == 0 and json.loads(text)["passed"] is True
    cols = np.array(json.loads(out.read_text())["columns"]).T
    assert np.allclose(cols @ cols.T, np.eye(4), atol=1e-12)


def test_construct_then_analyze(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, text, _ = run(capsys, "construct", "--spectrum", "1.5,0.5", "--m", "2", "--out", str(out))
    assert json.loads(text)["volume_ratio"] == pytest.approx(math.sqrt(0.75), abs=1e-6)
    code, text, _ = run(capsys, "analyze", str(out))
    assert json.loads(text)["volume_ratio"] == pytest.approx(math.sqrt(0.75), abs=1e-6)


def test_construct_from_matrix_file(tmp_path, capsys):
    (tmp_path / "x.json").write_text(json.dumps([[1.2, 0.3, 0.0], [0.3, 1.0, 0.1], [0.0, 0.1, 0.8]]))
    code, text, _ = run(capsys, "construct", "--xinv", str(tmp_path / "x.json"), "--m", "5", "--seed", "2")
    payload = json.loads(text)
    assert code == 0 and payload["verification"]["passed"]
    assert payload["frame"]["m"] == 5


def test_construct_trace_violation(capsys):
    code, _, err = run(capsys, "construct", "--spectrum", "1,1,1.5")
    assert code == 2 and "trace" in err


def test_construct_not_spd(capsys):
    code, _, _ = run(capsys, "construct", "--spectrum", "2.5,-0.5")
    assert code == 2


def test_random_command(tmp_path, capsys):
    code, out, _ = run(capsys, "random", "--m", "5", "--n", "3", "--seed", "4")
    assert code == 0 and json.loads(out)["m"] == 5


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "scalekit", "construct", "--spectrum", "1,1,1.5"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
