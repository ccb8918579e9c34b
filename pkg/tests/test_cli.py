import json
import subprocess
import sys

import pytest

from tricorn_lab.cli import run


def run_json(capsys, *argv):
    code = run(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_cn_table(capsys):
    code, rows = run_json(capsys, "cn", "--n-max", "3")
    assert code == 0
    assert [r["N"] for r in rows] == [3, 5, 7, 9]
    assert rows[0]["c_n"] == pytest.approx(-1.7548776662466927, abs=1e-12)


def test_scaling_exit_code(capsys):
    assert run(["scaling", "--n-lo", "2", "--n-hi", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,e_n,ratio" and len(lines) == 4


def test_aspect_reports_failure(capsys):
    code, doc = run_json(capsys, "aspect", "--n-lo", "1", "--n-hi", "2")
    assert code == 2 and doc["pass"] is False
    assert doc["aspect"]["1"] == pytest.approx(5 / 9)


def test_bconst(capsys):
    code, doc = run_json(capsys, "bconst")
    assert code == 0 and doc["pass"] is True


def test_access_verdict(capsys):
    code, doc = run_json(capsys, "access")
    assert code == 0 and doc["verdict"] is True and doc["period"] == 1


def test_interval(capsys):
    code, doc = run_json(capsys, "interval")
    assert code == 0 and doc["lo"] == pytest.approx(4 / 9, abs=1e-8)


def test_ray_csv_and_json(tmp_path, capsys):
    assert run(["ray", "--angle-num", "1", "--angle-den", "3", "--g-lo", "1e-3"]) == 0
    assert capsys.readouterr().out.startswith("potential,re,im\n")
    out = tmp_path / "ray.json"
    assert run(["ray", "--angle-num", "1", "--angle-den", "3", "--g-lo", "1e-3", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["angle"] == {"num": 1, "den": 3}


def test_render_writes_image(tmp_path):
    out = tmp_path / "img" / "t.ppm"
    assert run(["render", "--px", "16", "--max-iter", "50", "--out", str(out), "--threads", "2"]) == 0
    assert out.read_bytes().startswith(b"P6\n16 16\n255\n")
    assert json.loads(out.with_suffix(".json").read_text())["kind"] == "parameter"


@pytest.mark.parametrize("argv", [[], ["bogus"], ["cn", "--nope"], ["cn", "--n-max", "x"], ["cn", "--threads", "0"]])
def test_usage_errors(argv, capsys):
    assert run(argv) == 1
    assert "tricorn-lab" in capsys.readouterr().err


def test_runtime_error_exit(capsys):
    assert run(["cn", "--n-max", "40"]) == 1


def test_reports_idempotent(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(["argquant", "--n", "3", "--count", "5000", "--seed", "7", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tricorn_lab", "cn", "--n-max", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert len(json.loads(proc.stdout)) == 2
