"""Command-line interface.

Exit codes: 0 success, 2 I/O or parse failure, 3 invalid configuration,
4 degenerate data.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .blocklen import select_block_length
from .bootstrap import default_bandwidth
from .errors import ConfigurationError, DegenerateSeriesError, FStationarityError, ParseError
from .fileio import read_series_csv, report_to_json, series_to_csv_text, write_plot_csv
from .montecarlo import MonteCarloConfig, run_monte_carlo
from .pipeline import draw_seed, stationarity_test
from .simgen import MODEL_IDS, get_model, simulate

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_DEGENERATE = 0, 2, 3, 4


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _config_error(message: str):
    raise _Fail(EXIT_CONFIG, message)


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _str_list(text: str) -> List[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _add_common(p: argparse.ArgumentParser, *, inp=False, out=True):
    if inp:
        p.add_argument("--input", required=True, help="series CSV to read")
    if out:
        p.add_argument("--output", help="output file (default: standard output)")
    p.add_argument("--seed", type=int, help="root seed; drawn from entropy and reported if omitted")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fstationarity",
        description="Bootstrap tests for second-order stationarity of functional time series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run the combined stationarity test on a series CSV")
    _add_common(p, inp=True)
    p.add_argument("--H", type=int, default=4, help="largest lag tested (default 4)")
    p.add_argument("--K", type=int, default=200, help="bootstrap replicates (default 200)")
    p.add_argument("--n", type=int, help="local-mean bandwidth (default min(ceil(T/4), 90))")
    p.add_argument("--m", type=int, help="block length (default: data-driven)")
    p.add_argument("--alpha", type=float, default=0.05, help="level for the summary line")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="report as JSON document or key,value CSV")
    p.add_argument("--plot-data", help="also write the CUSUM profile CSV to this path")

    p = sub.add_parser("simulate", help="simulate a benchmark model and write a series CSV")
    _add_common(p)
    p.add_argument("--model", default="M0", help=f"one of {', '.join(MODEL_IDS)}")
    p.add_argument("--T", type=int, default=256, help="series length")
    p.add_argument("--grid", type=int, default=100, help="grid size G")
    p.add_argument("--burnin", type=int, default=100, help="burn-in steps")

    p = sub.add_parser("mc", help="Monte Carlo rejection-rate table")
    _add_common(p)
    p.add_argument("--models", type=_str_list, default=["M0"], help="comma-separated model ids")
    p.add_argument("--T", type=int, default=256, help="series length")
    p.add_argument("--grid", type=int, default=100, help="grid size G")
    p.add_argument("--N", type=int, default=500, help="runs per (model, n) cell")
    p.add_argument("--K", type=int, default=200, help="bootstrap replicates")
    p.add_argument("--H", type=int, default=4, help="largest lag tested")
    p.add_argument("--n", type=_int_list, help="comma-separated bandwidths (default auto)")
    p.add_argument("--burnin", type=int, default=100, help="burn-in steps")
    p.add_argument("--alpha", type=float, default=0.05, help="rejection level")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="table format")

    p = sub.add_parser("blocklen", help="print the block-length selection trace as JSON")
    _add_common(p, inp=True)
    p.add_argument("--n", type=int, help="local-mean bandwidth (default min(ceil(T/4), 90))")
    return parser


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise _Fail(EXIT_IO, f"cannot write {path}: {exc}")
    else:
        sys.stdout.write(text)


def _read(path: str):
    try:
        return read_series_csv(path)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read {path}: {exc}")
    except (ParseError, FStationarityError) as exc:
        raise _Fail(EXIT_IO, f"{path}: {exc}")


def _check_seed(seed):
    if seed is not None and not 0 <= seed < 2**64:
        _config_error("seed must lie in [0, 2**64)")


def cmd_test(args) -> int:
    if args.K < 1:
        _config_error("K must be ≥ 1")
    if args.H < 0:
        _config_error("H must be ≥ 0")
    if args.n is not None and args.n < 1:
        _config_error("n must be ≥ 1")
    if args.m is not None and args.m < 1:
        _config_error("m must be ≥ 1")
    if not 0.0 < args.alpha < 1.0:
        _config_error("alpha must lie in (0, 1)")
    _check_seed(args.seed)
    series = _read(args.input)
    if args.H > series.T - 2:
        _config_error(f"H must be ≤ T-2 = {series.T - 2}")
    if args.n is not None and args.n > series.T:
        _config_error(f"n must be ≤ T = {series.T}")
    if args.m is not None and args.m > series.T:
        _config_error(f"m must be ≤ T = {series.T}")
    seed = args.seed if args.seed is not None else draw_seed()
    report = stationarity_test(series, H=args.H, K=args.K, n=args.n, m=args.m, seed=seed)
    if args.format == "json":
        text = report_to_json(report, input_path=args.input)
    else:
        doc = json.loads(report_to_json(report, input_path=args.input))
        lines = ["key,value"]
        for key in sorted(doc):
            value = doc[key]
            lines.append(f"{key},\"{json.dumps(value)}\"" if isinstance(value, (list, dict))
                         else f"{key},{'' if value is None else value}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    if args.plot_data:
        try:
            write_plot_csv(series, args.H, args.plot_data)
        except OSError as exc:
            raise _Fail(EXIT_IO, f"cannot write {args.plot_data}: {exc}")
    verdict = "reject" if report.global_p < args.alpha else "retain"
    summary = (f"global_p={report.global_p:.4f} ({verdict} at alpha={args.alpha}) "
               f"m={report.tuning['m']} L={report.tuning['L']} seed={report.tuning['seed']}")
    print(summary, file=sys.stdout if args.output else sys.stderr)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.T < 2:
        _config_error("T must be ≥ 2")
    if args.grid < 1:
        _config_error("grid must be ≥ 1")
    if args.burnin < 0:
        _config_error("burnin must be ≥ 0")
    if args.model not in MODEL_IDS:
        _config_error(f"unknown model {args.model!r}; choose from {', '.join(MODEL_IDS)}")
    _check_seed(args.seed)
    seed = args.seed if args.seed is not None else draw_seed()
    series = simulate(get_model(args.model), args.T, args.grid, args.burnin, seed=seed)
    _emit(series_to_csv_text(series), args.output)
    if args.seed is None:
        print(f"seed={seed}", file=sys.stderr)
    return EXIT_OK


def cmd_mc(args) -> int:
    for name in ("T", "grid", "N", "K", "jobs"):
        if getattr(args, name) < 1:
            _config_error(f"{name} must be ≥ 1")
    if args.H < 0:
        _config_error("H must be ≥ 0")
    if args.burnin < 0:
        _config_error("burnin must be ≥ 0")
    _check_seed(args.seed)
    seed = args.seed if args.seed is not None else draw_seed()
    cfg = MonteCarloConfig(
        models=tuple(args.models), T=args.T, G=args.grid, N=args.N, K=args.K, H=args.H,
        n_values=tuple(args.n) if args.n else None, seed=seed, burnin=args.burnin,
        alpha=args.alpha,
    )
    try:
        cfg.validate()
    except ConfigurationError as exc:
        _config_error(str(exc))
    table = run_monte_carlo(cfg, jobs=args.jobs,
                            progress=lambda msg: print(msg, file=sys.stderr))
    _emit(table.to_csv() if args.format == "csv" else table.to_json(), args.output)
    return EXIT_OK


def cmd_blocklen(args) -> int:
    series = _read(args.input)
    n = args.n if args.n is not None else default_bandwidth(series.T)
    if not 1 <= n <= series.T:
        _config_error(f"n must satisfy 1 ≤ n ≤ T = {series.T}")
    trace = select_block_length(series, n)
    doc = trace.to_dict()
    doc["n"] = n
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.output)
    return EXIT_OK


COMMANDS = {"test": cmd_test, "simulate": cmd_simulate, "mc": cmd_mc, "blocklen": cmd_blocklen}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; those are configuration errors here
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DegenerateSeriesError as exc:
        print(f"error: degenerate series: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
