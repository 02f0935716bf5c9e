import json
import subprocess
import sys

import numpy as np
import pytest

from fstationarity.cli import main
from fstationarity.fileio import read_series_csv


@pytest.fixture
def series_csv(tmp_path):
    path = tmp_path / "series.csv"
    assert main(["simulate", "--model", "M0", "--T", "48", "--grid", "8", "--seed", "2",
                 "--output", str(path)]) == 0
    return path


def test_simulate_round_trip(series_csv):
    s = read_series_csv(series_csv)
    assert (s.T, s.G) == (48, 8)


def test_report_is_byte_identical(tmp_path, series_csv):
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        argv = ["test", "--input", str(series_csv), "--seed", "11", "--K", "30", "--H", "2",
                "--output", str(out)]
        assert main(argv) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert doc["seed"] == 11 and len(doc["p_combined"]) == 3


def test_input_not_modified(series_csv):
    before = series_csv.read_bytes()
    main(["test", "--input", str(series_csv), "--seed", "1", "--K", "10", "--H", "1"])
    assert series_csv.read_bytes() == before


def test_csv_format_and_plot(tmp_path, series_csv):
    out, plot = tmp_path / "r.csv", tmp_path / "plot.csv"
    assert main(["test", "--input", str(series_csv), "--seed", "1", "--K", "10", "--H", "1",
                 "--format", "csv", "--output", str(out), "--plot-data", str(plot)]) == 0
    assert out.read_text().startswith("key,value\n")
    assert len(plot.read_text().splitlines()) == 48 + 2


def test_bad_K_is_config_error(series_csv, capsys):
    assert main(["test", "--input", str(series_csv), "--K", "0"]) == 3
    assert "K must be ≥ 1" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv,code",
    [
        (["test", "--input", "/nonexistent/x.csv"], 2),
        (["test"], 3),
        (["simulate", "--model", "M9"], 3),
        (["mc", "--N", "0"], 3),
        (["frobnicate"], 3),
    ],
)
def test_exit_codes(argv, code):
    assert main(argv) == code


def test_parse_error_exit(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,0.5\n1,abc\n2,1\n")
    assert main(["test", "--input", str(bad)]) == 2


def test_degenerate_exit(tmp_path):
    path = tmp_path / "const.csv"
    rows = ["t,0.25,0.75"] + [f"{t},1,1" for t in range(1, 21)]
    path.write_text("\n".join(rows) + "\n")
    assert main(["blocklen", "--input", str(path)]) == 4


def test_blocklen_json(series_csv, capsys):
    assert main(["blocklen", "--input", str(series_csv), "--n", "12"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["n"] == 12 and doc["m"] >= 2


def test_mc_rates(capsys):
    assert main(["mc", "--models", "M0", "--N", "2", "--T", "32", "--K", "10", "--grid", "5",
                 "--H", "1", "--seed", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    rates = [float(v) for v in lines[1].split(",")[2:6]]
    assert set(rates) <= {0.0, 50.0, 100.0}


def test_module_entry_point(series_csv):
    proc = subprocess.run(
        [sys.executable, "-m", "fstationarity", "blocklen", "--input", str(series_csv)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "delta_hat" in proc.stdout
