"""End-to-end test: block length selection, bootstrap, combination."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .blocklen import select_block_length
from .bootstrap import BootstrapConfig, MultiplierSource, bootstrap_ensemble, default_bandwidth
from .combine import TestReport, combined_test
from .errors import ConfigurationError
from .fda import FunctionalSeries

__all__ = ["stationarity_test", "draw_seed"]


def draw_seed() -> int:
    """Fresh 64-bit seed from OS entropy."""
    return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])


def stationarity_test(
    series: FunctionalSeries,
    H: int = 4,
    K: int = 200,
    n: Optional[int] = None,
    m: Optional[int] = None,
    seed: Optional[int] = None,
    multipliers: Optional[MultiplierSource] = None,
) -> TestReport:
    """Test a functional series for second-order stationarity up to lag ``H``.

    Parameters
    ----------
    series : FunctionalSeries
    H : int
        Largest autocovariance lag included.
    K : int
        Number of bootstrap replicates.
    n : int, optional
        Local-mean bandwidth; defaults to ``min(ceil(T/4), 90)``.
    m : int, optional
        Block length; chosen from the data when omitted.
    seed : int, optional
        Seed of the multiplier streams; drawn from entropy (and reported) if omitted.

    Returns
    -------
    TestReport
    """
    T = series.T
    if isinstance(K, bool) or int(K) != K or K < 1:
        raise ConfigurationError("K must be >= 1")
    n_auto = n is None
    if n_auto:
        n = default_bandwidth(T)
    if seed is None:
        seed = draw_seed()
    trace = None
    if m is None:
        trace = select_block_length(series, n)
        m = trace.m
    cfg = BootstrapConfig(m=int(m), n=int(n), H=int(H), K=int(K), seed=int(seed))
    ens = bootstrap_ensemble(series, cfg, multipliers=multipliers)
    report = combined_test(ens)
    report.tuning = {
        "T": T,
        "G": series.G,
        "H": cfg.H,
        "K": cfg.K,
        "m": cfg.m,
        "n": cfg.n,
        "n_auto": n_auto,
        "L": trace.L if trace is not None else None,
        "seed": cfg.seed,
    }
    report.diagnostics = {
        "observed": ens.observed.tolist(),
        "blocklen": trace.to_dict() if trace is not None else None,
    }
    if n_auto:
        report.diagnostics["notes"] = [
            f"bandwidth n={n} set by the default rule min(ceil(T/4), 90)"
        ]
    return report
