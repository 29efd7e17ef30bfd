import csv
import io
import json
import subprocess
import sys

import pytest

from kleinparadox.cli import CSV_COLUMNS, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_scatter_point(capsys):
    code, out, _ = run(["scatter", "--mass", "1", "--potential", "4", "--energy", "1.5"], capsys)
    assert code == 0
    assert "KleinZone" in out and "8.44407374867" in out and "(virtual)" in out


def test_scatter_invalid_energy(capsys, tmp_path):
    target = tmp_path / "o.csv"
    code, _, err = run(["scatter", "--mass", "1", "--potential", "4", "--energy", "0.5", "--out", str(target)], capsys)
    assert code == 2 and "E <= m" in err
    assert not target.exists()


def test_scatter_degenerate(capsys):
    code, _, err = run(["scatter", "--mass", "1", "--potential", "0", "--energy", "2"], capsys)
    assert code == 2 and "k1" in err


def test_regime(capsys):
    code, out, _ = run(["regime", "--mass", "1", "--potential", "4", "--energy", "3.5"], capsys)
    assert code == 0 and out.startswith("Evanescent")


def test_sweep_schema_and_identity(capsys, tmp_path):
    target = tmp_path / "s.csv"
    argv = ["sweep", "--mass", "1", "--potential", "10", "--energy-min", "1.5", "--energy-max", "8.5",
            "--samples", "8", "--out", str(target)]
    assert run(argv, capsys)[0] == 0
    text = target.read_text()
    assert text.splitlines()[0].split(",") == list(CSV_COLUMNS)
    recs = rows(text)
    assert len(recs) == 8
    for r in recs:
        assert r["regime"] == "KleinZone"
        assert abs(float(r["R_G"]) - 1) < 1e-12
        assert float(r["R"]) > 1 and float(r["T"]) < 0
        assert r["virtual"] == "true"
    first = text
    assert run(argv, capsys)[0] == 0
    assert target.read_bytes() == first.encode()


def test_sweep_mixed_regimes(capsys):
    code, out, _ = run(["sweep", "--mass", "1", "--potential", "4", "--energy-min", "0.5", "--energy-max", "6",
                        "--samples", "12"], capsys)
    assert code == 0
    recs = rows(out)
    kinds = {r["regime"] for r in recs}
    assert {"NoIncident", "KleinZone", "Evanescent", "Transmitting"} <= kinds
    for r in recs:
        if r["regime"] == "NoIncident":
            assert r["R"] == "" and r["error"]
        if r["regime"] != "KleinZone":
            assert r["R_G"] == ""


def test_empty_sweep_warns(capsys):
    with pytest.warns(UserWarning):
        code, out, err = run(["sweep", "--mass", "1", "--potential", "4", "--energy-min", "0.1",
                              "--energy-max", "0.9", "--samples", "3"], capsys)
    assert code == 0
    assert out.strip() == ",".join(CSV_COLUMNS)


def test_json_format(capsys):
    code, out, _ = run(["sweep", "--mass", "1", "--potential", "10", "--energy-min", "2", "--energy-max", "3",
                        "--samples", "2", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and len(data["records"]) == 2 and "virtual" in data["metadata"]


def test_config_file_with_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep settings\nmass = 1\npotential = 10\nenergy-min = 1.5\nenergy_max = 8.5\nsamples = 8\n")
    code, out, _ = run(["sweep", "--config", str(cfg), "--samples", "3"], capsys)
    assert code == 0 and len(rows(out)) == 3

    cfg.write_text("mass = 1\nbogus = 2\n")
    code, _, err = run(["sweep", "--config", str(cfg)], capsys)
    assert code == 2 and "bogus" in err


def test_missing_config_is_io_error(capsys, tmp_path):
    code, _, _ = run(["sweep", "--config", str(tmp_path / "none.cfg")], capsys)
    assert code == 4


def test_images(capsys, tmp_path):
    target = tmp_path / "plane.csv"
    code, out, _ = run(["images", "--charge", "1", "--height", "1", "--grid", "11", "--out", str(target)], capsys)
    assert code == 0
    assert "0.0530516476972984" in out
    lines = target.read_text().splitlines()
    assert lines[0] == "x,y,V" and len(lines) == 122
    assert all(float(line.split(",")[2]) == 0.0 for line in lines[1:])
    assert run(["images", "--height", "0"], capsys)[0] == 2


def test_simulate_bad_config(capsys):
    code, _, err = run(["simulate", "--mass", "1", "--potential", "4", "--energy", "1.5",
                        "--grid-points", "2"], capsys)
    assert code == 2 and "num_points" in err


def test_simulate_small_run(capsys, tmp_path):
    code, out, _ = run(["simulate", "--mass", "1", "--potential", "1", "--energy", "3", "--grid-points", "2501",
                        "--half-width", "250", "--sigma", "8", "--center", "-50", "--total-time", "200",
                        "--snapshot-every", "2000", "--snapshot-dir", str(tmp_path / "snaps"),
                        "--out", str(tmp_path / "r.csv")], capsys)
    assert code == 0 and "Transmitting" in out
    assert any((tmp_path / "snaps").iterdir())
    rec = rows((tmp_path / "r.csv").read_text())[0]
    assert float(rec["R_num"]) == pytest.approx(0.0578, abs=0.02)


def test_simulate_never_separates(capsys):
    code, _, _ = run(["simulate", "--mass", "1", "--potential", "4", "--energy", "1.5", "--grid-points", "801",
                      "--half-width", "80", "--sigma", "5", "--center", "-30", "--total-time", "0"], capsys)
    assert code == 3


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kleinparadox.cli", "regime", "--mass", "1", "--potential", "4",
                           "--energy", "1.5"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("KleinZone")
