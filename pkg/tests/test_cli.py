import json

import pytest

from bmst.cli import main
from bmst.harness import read_csv


def _cfg(tmp_path, **kw):
    raw = {"code": "spc:4x10", "snr_list_db": [3.0], "m": 1, "l": 3, "d": 1, "max_frames": 5,
           "record_elapsed": False}
    raw.update(kw)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(raw))
    return str(path)


def test_simulate_and_reference(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["simulate", _cfg(tmp_path), "--output", str(out), "--quiet"]) == 0
    assert len(read_csv(out)) == 1
    assert main(["reference", _cfg(tmp_path), "--output", str(out), "--quiet"]) == 0
    assert read_csv(out)[0].rate_overall == pytest.approx(0.75)


def test_config_errors_exit_2(tmp_path, capsys):
    assert main(["simulate", _cfg(tmp_path, bogus=1)]) == 2
    assert "bogus" in capsys.readouterr().err
    assert main(["simulate", str(tmp_path / "absent.json")]) == 2
    assert main(["no-such-command"]) == 2
    assert main(["analyze", "spectrum", "--code", "zzz", "--l", "2"]) == 2


def test_runtime_failure_exit_3(tmp_path):
    bad = tmp_path / "pi.txt"
    bad.write_text("4 1 0\n0 1 2 3\n")
    assert main(["interleaver", "check", str(bad)]) == 3
    assert main(["analyze", "iowef", "--code", "crc32+conv:2-1-2:octal(5,7):k=30"]) == 3


def test_interleaver_gen_check(tmp_path, capsys):
    path = tmp_path / "pi.txt"
    assert main(["interleaver", "gen", "--n", "400", "--seed", "4", "--output", str(path)]) == 0
    assert main(["interleaver", "check", str(path)]) == 0
    assert "S=10" in capsys.readouterr().out


def test_codebook_nr_verify(tmp_path, capsys):
    path = tmp_path / "nr.txt"
    assert main(["codebook", "nr", "--output", str(path)]) == 0
    assert len(path.read_text().split()) == 256
    assert main(["codebook", "verify", str(path), "--n", "15", "--size", "256", "--d", "5"]) == 0
    assert json.loads(capsys.readouterr().out) == {"n": 15, "size": 256, "d_min": 5}
    assert main(["codebook", "verify", str(path), "--d", "6"]) == 3


def test_analyze_commands(tmp_path, capsys):
    assert main(["analyze", "iowef", "--code", "rc:2x1", "--l", "1"]) == 0
    assert capsys.readouterr().out.splitlines() == ["i,j,coefficient", "0,0,1.0", "1,4,1.0"]
    assert main(["analyze", "spectrum", "--code", "rc:2x1", "--l", "1", "--j-max", "8"]) == 0
    assert capsys.readouterr().out.splitlines() == ["j,D_j", "4,1.0"]
    assert main(["analyze", "union", "--code", "rc:2x1", "--l", "1", "--j-max", "8", "--snr", "0,3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "gamma_db,ber_bound" and len(lines) == 3
    curve = tmp_path / "c.csv"
    curve.write_text("gamma_db,ber\n4.0,0.01\n6.0,0.0001\n")
    assert main(["analyze", "genie", "--curve", str(curve), "--m", "1"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[1].startswith("0.989")
