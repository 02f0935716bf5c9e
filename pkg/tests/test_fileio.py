import datetime as dt
import json

import numpy as np
import pytest

from fstationarity.errors import ParseError
from fstationarity.fda import FunctionalSeries
from fstationarity.fileio import (
    IngestionPolicy,
    cusum_profile,
    file_digest,
    ingest_daily_csv,
    read_series_csv,
    report_to_dict,
    report_to_json,
    write_plot_csv,
    write_series_csv,
)
from fstationarity.pipeline import stationarity_test


def test_round_trip(tmp_path, small_series):
    path = tmp_path / "s.csv"
    write_series_csv(small_series, path)
    back = read_series_csv(path)
    np.testing.assert_array_equal(back.data, small_series.data)
    assert back.G == small_series.G


def test_rows_sorted_by_index(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("t,0.25,0.75\n2,3,4\n1,1,2\n")
    np.testing.assert_array_equal(read_series_csv(path).data, [[1, 2], [3, 4]])


@pytest.mark.parametrize(
    "text,match,line",
    [
        ("t,0.25,0.75\n1,1,2\n2,3\n", "expected 3 cells", 3),
        ("t,0.25,0.75\n1,1,x\n2,3,4\n", "non-numeric", 2),
        ("t,0.25,0.75\n1,1,2\n1,3,4\n", "duplicate", 3),
        ("t,0.25,0.75\n", "empty series", None),
        ("t,0.1,0.75\n1,1,2\n2,3,4\n", "midpoint grid", 1),
        ("x,0.25,0.75\n1,1,2\n", "header", 1),
    ],
)
def test_parse_errors(tmp_path, text, match, line):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ParseError, match=match) as info:
        read_series_csv(path)
    assert info.value.line == line


def _daily(path, years, value, skip=()):
    lines = ["date,value"]
    for y in years:
        d = dt.date(y, 1, 1)
        while d.year == y:
            if d not in skip:
                lines.append(f"{d.isoformat()},{value(d)}")
            d += dt.timedelta(days=1)
    path.write_text("\n".join(lines) + "\n")


def test_ingest_constant_years(tmp_path):
    path = tmp_path / "d.csv"
    _daily(path, [2000, 2001, 2002], lambda d: 7.0)  # 2000 is a leap year
    res = ingest_daily_csv(path)
    assert res.series.data.shape == (3, 365)
    np.testing.assert_array_equal(res.series.data, 7.0)
    assert res.years == [2000, 2001, 2002] and not res.dropped and res.filled == 0


def test_ingest_drops_sparse_year(tmp_path):
    path = tmp_path / "d.csv"
    skip = {dt.date(2001, 3, 1) + dt.timedelta(days=i) for i in range(30)}
    _daily(path, [2000, 2001, 2002], lambda d: 1.0, skip)
    res = ingest_daily_csv(path)
    assert res.years == [2000, 2002]
    assert res.dropped == [{"year": 2001, "missing_days": 30}]


def test_ingest_fills_gap_linearly(tmp_path):
    path = tmp_path / "d.csv"
    gap = dt.date(2001, 1, 11)

    def value(d):
        return {dt.date(2001, 1, 10): 10.0, dt.date(2001, 1, 12): 12.0}.get(d, 0.0)

    _daily(path, [2000, 2001], value, {gap})
    res = ingest_daily_csv(path)
    assert res.series.data[1, 10] == pytest.approx(11.0)
    assert res.filled == 1


def test_ingest_conserves_values(tmp_path):
    path = tmp_path / "d.csv"
    _daily(path, [2003, 2004], lambda d: d.timetuple().tm_yday % 7)
    res = ingest_daily_csv(path)
    # Feb 29 of 2004 (day 60, value 4) is the only value not carried over
    total = sum(d % 7 for d in range(1, 366)) + sum(d % 7 for d in range(1, 367)) - 60 % 7
    assert res.series.data.sum() == pytest.approx(total)


def test_ingest_bad_value(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("date,value\n2000-01-01,abc\n")
    with pytest.raises(ParseError, match="non-numeric") as info:
        ingest_daily_csv(path)
    assert info.value.line == 2


def test_policy_validation():
    with pytest.raises(ValueError):
        IngestionPolicy(max_missing_frac=1.5)


@pytest.fixture
def report_and_input(tmp_path, m0_series):
    path = tmp_path / "in.csv"
    write_series_csv(m0_series, path)
    return stationarity_test(m0_series, H=2, K=20, seed=5), path


def test_report_layout(report_and_input):
    rep, path = report_and_input
    doc = report_to_dict(rep, path)
    for key in ("p_mean", "p_lag", "p_combined", "global_p", "m", "n", "L", "K", "seed",
                "delta_hat", "gamma_hat", "rho", "provenance"):
        assert key in doc
    assert len(doc["p_lag"]) == 3
    assert doc["provenance"]["input_digest"] == file_digest(path)
    assert doc["seed"] == 5
    assert report_to_json(rep, path) == report_to_json(rep, path)
    json.loads(report_to_json(rep, path))


def test_cusum_profile(tmp_path, small_series):
    prof = cusum_profile(small_series, 1)
    assert prof.shape == (small_series.T + 1, 4)
    np.testing.assert_allclose(prof[[0, -1], 1:], 0.0, atol=1e-12)
    path = tmp_path / "plot.csv"
    write_plot_csv(small_series, 1, path)
    assert path.read_text().splitlines()[0] == "u,norm_Usq_mean,norm_Usq_lag0,norm_Usq_lag1"
