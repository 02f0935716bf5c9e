"""CSV and JSON interchange: series files, daily-record ingestion, reports, plot data.

Series CSV
    Header ``t,<tau_1>,...,<tau_G>`` where the tau cells are the grid abscissae
    written with 12 significant digits; each following row holds the integer
    index ``t`` and the ``G`` samples of curve ``t``.

Daily CSV
    Columns ``date,value`` with ISO 8601 dates, comma separated, ``.`` decimal
    point. Empty values count as missing.

Report JSON
    One document per test run: the p-values (``p_mean``, ``p_lag``,
    ``p_combined``), tuning (``m``, ``n``, ``L``, ``K``, ``seed``), block length
    diagnostics (``delta_hat``, ``gamma_hat``, ``rho``) and a ``provenance``
    block with the input digest and software version.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import pandas as pd

from . import __version__
from .combine import TestReport
from .cusum import cusum_lag, cusum_mean
from .errors import ParseError
from .fda import FunctionalSeries, Grid

__all__ = [
    "IngestionPolicy",
    "IngestionResult",
    "write_series_csv",
    "read_series_csv",
    "series_to_csv_text",
    "ingest_daily_csv",
    "file_digest",
    "report_to_dict",
    "report_to_json",
    "cusum_profile",
    "write_plot_csv",
]

DAYS_PER_YEAR = 365


def series_to_csv_text(series: FunctionalSeries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t"] + [f"{tau:.12g}" for tau in series.grid.points])
    for t, row in enumerate(series.data, start=1):
        writer.writerow([t] + [repr(float(v)) for v in row])
    return buf.getvalue()


def write_series_csv(series: FunctionalSeries, path) -> None:
    """Write ``series`` in the series CSV format."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(series_to_csv_text(series))


def _parse_float(cell: str, line: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f"non-numeric cell {cell!r}", line) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {cell!r}", line)
    return value


def read_series_csv(path) -> FunctionalSeries:
    """Read a series CSV; rows are ordered by their ``t`` index."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    while rows and not any(cell.strip() for cell in rows[-1]):
        rows.pop()
    if not rows:
        raise ParseError("empty file: missing header")
    header = rows[0]
    if not header or header[0].strip() != "t":
        raise ParseError("header must start with 't'", 1)
    taus = np.array([_parse_float(c, 1) for c in header[1:]])
    G = taus.size
    if G == 0:
        raise ParseError("header lists no grid points", 1)
    grid = Grid(G)
    if not np.allclose(taus, grid.points, rtol=0, atol=1e-9):
        raise ParseError(f"grid abscissae are not the {G}-point midpoint grid", 1)

    seen = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != G + 1:
            raise ParseError(f"expected {G + 1} cells, found {len(row)}", lineno)
        try:
            t = int(row[0])
        except ValueError:
            raise ParseError(f"non-integer index {row[0]!r}", lineno) from None
        if t in seen:
            raise ParseError(f"duplicate index t={t}", lineno)
        seen[t] = [_parse_float(c, lineno) for c in row[1:]]
    if not seen:
        raise ParseError("empty series: no data rows")
    if len(seen) < 2:
        raise ParseError("a series needs at least 2 curves")
    data = np.array([seen[t] for t in sorted(seen)])
    return FunctionalSeries(data, grid)


@dataclass(frozen=True)
class IngestionPolicy:
    """How daily records are turned into yearly curves."""

    days_per_year: int = DAYS_PER_YEAR
    drop_feb29: bool = True
    max_missing_frac: float = 0.05

    def __post_init__(self):
        if not 0.0 <= self.max_missing_frac < 1.0:
            raise ValueError("max_missing_frac must lie in [0, 1)")
        if self.days_per_year != DAYS_PER_YEAR or not self.drop_feb29:
            raise ValueError("only 365-day years with Feb 29 dropped are supported")


@dataclass
class IngestionResult:
    series: FunctionalSeries
    years: List[int]
    dropped: List[dict] = field(default_factory=list)
    filled: int = 0


def _day_index(dates: pd.DatetimeIndex) -> np.ndarray:
    # 0-based day in a 365-day year, Feb 29 already removed
    doy = dates.dayofyear.to_numpy() - 1
    late_leap = dates.is_leap_year & (dates.month > 2)
    return doy - late_leap.astype(int)


def ingest_daily_csv(path, policy: Optional[IngestionPolicy] = None) -> IngestionResult:
    """Group daily records into one curve per calendar year.

    Feb 29 is dropped, years missing more than ``policy.max_missing_frac`` of
    their days are dropped (and listed in the result), and remaining gaps are
    filled by linear interpolation over the day index.
    """
    policy = policy or IngestionPolicy()
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise ParseError(f"cannot read daily CSV: {exc}") from None
    if list(frame.columns[:2]) != ["date", "value"]:
        raise ParseError("daily CSV must have columns 'date,value'", 1)

    dates = pd.to_datetime(frame["date"].str.strip(), format="%Y-%m-%d", errors="coerce")
    bad = np.flatnonzero(dates.isna().to_numpy())
    if bad.size:
        raise ParseError(f"unparseable date {frame['date'].iloc[bad[0]]!r}", int(bad[0]) + 2)
    raw = frame["value"].str.strip()
    values = pd.to_numeric(raw.replace("", np.nan), errors="coerce")
    bad = np.flatnonzero(values.isna().to_numpy() & (raw != "").to_numpy())
    if bad.size:
        raise ParseError(f"non-numeric value {raw.iloc[bad[0]]!r}", int(bad[0]) + 2)
    dup = np.flatnonzero(dates.duplicated().to_numpy())
    if dup.size:
        raise ParseError(f"duplicate date {frame['date'].iloc[dup[0]]!r}", int(dup[0]) + 2)

    idx = pd.DatetimeIndex(dates)
    keep = ~((idx.month == 2) & (idx.day == 29))
    idx = idx[keep]
    vals = values.to_numpy(dtype=float)[keep]
    day = _day_index(idx)
    years_all = idx.year.to_numpy()

    curves, years, dropped, filled = [], [], [], 0
    for year in sorted(set(years_all.tolist())):
        sel = years_all == year
        curve = np.full(DAYS_PER_YEAR, np.nan)
        curve[day[sel]] = vals[sel]
        ok = np.isfinite(curve)
        missing = DAYS_PER_YEAR - int(ok.sum())
        if missing / DAYS_PER_YEAR > policy.max_missing_frac:
            dropped.append({"year": int(year), "missing_days": missing})
            continue
        if missing:
            pos = np.arange(DAYS_PER_YEAR)
            curve[~ok] = np.interp(pos[~ok], pos[ok], curve[ok])
            filled += missing
        curves.append(curve)
        years.append(int(year))
    if len(curves) < 2:
        raise ParseError(f"need at least 2 usable years, found {len(curves)}")
    series = FunctionalSeries(np.vstack(curves), Grid(DAYS_PER_YEAR))
    return IngestionResult(series, years, dropped, filled)


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def _clean(value):
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def report_to_dict(report: TestReport, input_path=None, extra: Optional[dict] = None) -> dict:
    """Flatten a :class:`TestReport` into the report JSON layout."""
    tuning = report.tuning
    trace = report.diagnostics.get("blocklen") or {}
    doc = {
        "p_mean": report.per_hypothesis_p[0],
        "p_lag": report.per_hypothesis_p[1:],
        "p_combined": report.p_combined,
        "global_p": report.global_p,
        "combined_W": report.combined_W,
        "individual_p_mean": report.individual_p[0],
        "individual_p_lag": report.individual_p[1:],
        "observed": report.diagnostics.get("observed"),
        "m": tuning.get("m"),
        "n": tuning.get("n"),
        "L": tuning.get("L"),
        "K": tuning.get("K"),
        "H": tuning.get("H"),
        "T": tuning.get("T"),
        "G": tuning.get("G"),
        "seed": tuning.get("seed"),
        "delta_hat": trace.get("delta_hat"),
        "gamma_hat": trace.get("gamma_hat"),
        "m_hat_raw": trace.get("m_hat_raw"),
        "rho": trace.get("rho"),
        "notes": list(report.diagnostics.get("notes", [])) + list(trace.get("warnings", [])),
        "provenance": {
            "software": f"fstationarity {__version__}",
            "input": os.path.basename(str(input_path)) if input_path is not None else None,
            "input_digest": file_digest(input_path) if input_path is not None else None,
        },
    }
    if extra:
        doc["provenance"].update(extra)
    return _clean(doc)


def report_to_json(report: TestReport, input_path=None, extra: Optional[dict] = None) -> str:
    return json.dumps(report_to_dict(report, input_path, extra), indent=2, sort_keys=True) + "\n"


def cusum_profile(series: FunctionalSeries, H: int) -> np.ndarray:
    """Squared tau-norms of the CUSUM processes at ``u = j/T``.

    Returns a ``(T + 1) x (H + 3)`` array: column 0 is ``u``, then the mean
    process, then lags ``0..H``.
    """
    T = series.T
    u = np.arange(T + 1) / T
    cols = [u]
    for c in [cusum_mean(series)] + [cusum_lag(series, h) for h in range(H + 1)]:
        U = c.partials - u[:, None] * c.total
        cols.append(np.einsum("jd,jd->j", U, U) * c.weight)
    return np.column_stack(cols)


def write_plot_csv(series: FunctionalSeries, H: int, path) -> None:
    """Write :func:`cusum_profile` with header ``u,norm_Usq_mean,norm_Usq_lag0,...``."""
    prof = cusum_profile(series, H)
    header = ["u", "norm_Usq_mean"] + [f"norm_Usq_lag{h}" for h in range(H + 1)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in prof:
            writer.writerow([repr(float(v)) for v in row])
