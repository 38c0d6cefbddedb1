import csv
import io
import json
import subprocess
import sys

import pytest

from weakvalue.cli import main

from randomized import FIXTURES


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("argv,code", [
    (["threebox"], 0),
    (["hardy", "--format", "csv"], 0),
    (["mzi", "--q", "0.6"], 0),
    (["mzi-sweep", "--q-steps", "2", "--beta-steps", "2"], 0),
    (["run", str(FIXTURES / "threebox.wks")], 0),
    (["meter", "--scenario", "threebox", "--op", "C", "--g", "0.01", "--sigma", "1"], 0),
    (["meter", "--scenario", "hardy", "--op", "Np*Ne", "--g", "0.01", "--sigma", "1"], 0),
    ([], 1),
    (["nope"], 1),
    (["threebox", "--format", "xml"], 1),
    (["mzi"], 1),
    (["mzi", "--q", "1.5"], 1),
    (["mzi-sweep", "--q-steps", "0", "--beta-steps", "2"], 1),
    (["meter", "--scenario", "threebox", "--op", "Z", "--g", "1", "--sigma", "1"], 1),
    (["meter", "--scenario", "threebox", "--op", "C", "--g", "-1", "--sigma", "1"], 1),
    (["threebox", "--tol", "0"], 1),
    (["run", "/nonexistent/file.wks"], 1),
])
def test_exit_codes(capsys, argv, code):
    got, out, err = run(capsys, *argv)
    assert got == code
    if code == 1:
        assert out == "" and err


def test_parse_error_exit(capsys, tmp_path):
    path = tmp_path / "bad.wks"
    path.write_text("wks 1\nbasis B3 A B C\nket x : B3 = 1|A> + 1|Z>\n", encoding="utf-8")
    code, out, err = run(capsys, "run", str(path))
    assert code == 2 and out == ""
    assert f"{path}:3:23:" in err and "^" in err


def test_empty_program_exit(capsys, tmp_path):
    path = tmp_path / "empty.wks"
    path.write_text("wks 1\n", encoding="utf-8")
    code, out, err = run(capsys, "run", str(path))
    assert code == 3
    assert json.loads(out)["payload"]["weak_values"] == {}


def test_all_failed_exit(capsys, tmp_path):
    path = tmp_path / "dark.wks"
    path.write_text("wks 1\nbasis X a b\nket p : X = 1|a>\nket f : X = 1|b>\nop P = proj p\n"
                    "weak P pre p post f\n", encoding="utf-8")
    code, out, _ = run(capsys, "run", str(path))
    assert code == 3
    assert json.loads(out)["payload"]["weak_values"]["0:P"] == {"error": "post_selection_orthogonal"}


def test_threebox_json(capsys):
    code, out, _ = run(capsys, "threebox", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert set(doc) == {"tool_version", "scenario", "format", "payload"}
    assert doc["scenario"] == "threebox" and doc["format"] == "json"
    c = doc["payload"]["weak_values"]["C"]
    assert abs(c["re"] + 1) <= 1e-10 and abs(c["im"]) <= 1e-10


def test_json_keys_sorted_and_reals_fixed(capsys):
    _, out, _ = run(capsys, "hardy")

    def check(obj):
        if isinstance(obj, dict):
            assert list(obj) == sorted(obj)
            for v in obj.values():
                check(v)
        elif isinstance(obj, list):
            for v in obj:
                check(v)
    check(json.loads(out))
    assert "-0.00000000000e+00" not in out
    assert '"re": -1.00000000000e+00' in out


def test_mzi_table_row(capsys):
    code, out, _ = run(capsys, "mzi", "--q", "0.4472135955", "--beta", "0", "--format", "table")
    assert code == 0
    rows = [ln.split() for ln in out.splitlines()]
    assert rows[0] == ["key", "value"]
    values = dict(r for r in rows[2:] if len(r) == 2)
    assert float(values["weak_values.N@D.re"]) == pytest.approx(-1, abs=1e-9)


def test_format_position_independent(capsys):
    _, before, _ = run(capsys, "--format", "csv", "threebox")
    _, after, _ = run(capsys, "threebox", "--format", "csv")
    assert before == after and before.startswith("key,value\n")


def test_tol_threaded_to_notes(capsys):
    _, out, _ = run(capsys, "threebox", "--tol", "1e-3")
    notes = json.loads(out)["payload"]["notes"]
    assert notes and all("(tol 1.0e-03) ok" in n for n in notes)


def test_sweep_rows(capsys):
    code, out, _ = run(capsys, "mzi-sweep", "--q-steps", "4", "--beta-steps", "6", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["q", "r", "beta", "re_Nw_D", "im_Nw_D", "re_Nw_B", "im_Nw_B",
                       "abl_N_given_D", "dark_port_flag"]
    body = rows[1:]
    assert len(body) == 24
    assert [float(r[0]) for r in body[:6]] == [0.125] * 6
    for r in body:
        assert "nan" not in ",".join(r).lower()
        assert r[8] in ("0", "1")
    # q = 1/sqrt2 is not on this grid, so no port goes dark
    assert all(r[8] == "0" for r in body)


def test_sweep_single_cell(capsys):
    code, out, _ = run(capsys, "mzi-sweep", "--q-steps", "1", "--beta-steps", "2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))[1:]
    assert code == 0 and len(rows) == 2
    assert all(r[8] == "0" for r in rows)


def test_sweep_dark_flag_serialization():
    from weakvalue.scenarios import BeamSplitter, mzi
    from weakvalue.serialize import sweep_row
    q = 2 ** -0.5
    row = sweep_row(mzi(BeamSplitter.from_q(q)), q, q, 0.0)
    assert row[3] is None and row[4] is None and row[8] == 1
    # a strong N measurement destroys the interference, so ABL stays defined at the dark port
    assert row[7] == pytest.approx(0.5, abs=1e-12)
    assert row[5] == pytest.approx(0.5, abs=1e-10)


def test_sweep_out_file(capsys, tmp_path):
    path = tmp_path / "grid.csv"
    code, out, err = run(capsys, "mzi-sweep", "--q-steps", "3", "--beta-steps", "3",
                         "--format", "csv", "--out", str(path))
    assert code == 0 and out == ""
    assert "9 rows" in err
    assert len(path.read_text(encoding="utf-8").splitlines()) == 10


def test_meter_payload(capsys):
    code, out, _ = run(capsys, "meter", "--scenario", "threebox", "--op", "C",
                       "--g", "1000", "--sigma", "1")
    doc = json.loads(out)["payload"]
    assert code == 0
    peaks = {c["eigenvalue"]: c["peak_weight"] for c in doc["components"]}
    assert peaks[1.0] == pytest.approx(0.2, abs=1e-6)
    assert peaks[0.0] == pytest.approx(0.8, abs=1e-6)


@pytest.mark.parametrize("argv", [
    ["threebox"], ["hardy", "--format", "table"], ["mzi-sweep", "--q-steps", "3", "--beta-steps", "4"],
    ["run", str(FIXTURES / "mzi.wks"), "--format", "csv"],
])
def test_byte_identical_processes(argv):
    cmd = [sys.executable, "-m", "weakvalue", *argv]
    a = subprocess.run(cmd, capture_output=True, check=True)
    b = subprocess.run(cmd, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.stdout
