"""Monte Carlo experiments on the benchmark models.

Every run draws its simulation and bootstrap seeds from
``SeedSequence([seed, model_index, n, run])``, so results do not depend on
how runs are distributed over worker processes.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .blocklen import select_block_length
from .bootstrap import default_bandwidth
from .cusum import nonstat_measures
from .errors import ConfigurationError, FStationarityError
from .pipeline import stationarity_test
from .simgen import MODEL_IDS, get_model, simulate

__all__ = [
    "MonteCarloConfig",
    "RateRow",
    "RateTable",
    "run_seeds",
    "parallel_map",
    "run_monte_carlo",
    "measure_study",
    "blocklen_study",
]


def run_seeds(seed: int, model_id: str, n: int, run: int) -> tuple[int, int]:
    """``(simulation_seed, bootstrap_seed)`` of one run."""
    ss = np.random.SeedSequence([seed, MODEL_IDS.index(model_id), n, run])
    a, b = ss.generate_state(2, dtype=np.uint64)
    return int(a), int(b)


def parallel_map(fn: Callable, jobs_args: Sequence, jobs: int = 1) -> list:
    """Ordered map over ``jobs_args``; processes are used when ``jobs > 1``."""
    if jobs <= 1 or len(jobs_args) <= 1:
        return [fn(a) for a in jobs_args]
    chunk = max(1, len(jobs_args) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, jobs_args, chunksize=chunk))


@dataclass(frozen=True)
class MonteCarloConfig:
    models: Sequence[str] = ("M0",)
    T: int = 256
    G: int = 100
    N: int = 500
    K: int = 200
    H: int = 4
    n_values: Optional[Sequence[int]] = None
    seed: int = 0
    burnin: int = 100
    alpha: float = 0.05

    def validate(self) -> None:
        for name in ("T", "G", "N", "K"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if self.H < 0:
            raise ConfigurationError("H must be >= 0")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError("alpha must lie in (0, 1)")
        for mid in self.models:
            get_model(mid)
        for n in self.bandwidths():
            if not 1 <= n <= self.T:
                raise ConfigurationError(f"bandwidth n={n} outside 1..T={self.T}")

    def bandwidths(self) -> List[int]:
        if not self.n_values:
            return [default_bandwidth(self.T)]
        return [int(n) for n in self.n_values]


@dataclass
class RateRow:
    """Rejection rates (percent) of one ``(model, n)`` cell.

    ``rates`` is ordered as ``H0_m, H0_c0, H0_0, ..., H0_H``; ``pvalues``
    keeps the raw per-run p-values in the same column order.
    """

    model_id: str
    n: int
    rates: List[float]
    m_mean: float
    m_sd: float
    N: int
    pvalues: np.ndarray = field(repr=False, default=None)
    m_values: List[int] = field(repr=False, default_factory=list)


@dataclass
class RateTable:
    H: int
    alpha: float
    seed: int
    rows: List[RateRow]

    @property
    def columns(self) -> List[str]:
        return ["H0_m", "H0_c0"] + [f"H0_{h}" for h in range(self.H + 1)]

    def row(self, model_id: str, n: Optional[int] = None) -> RateRow:
        for r in self.rows:
            if r.model_id == model_id and (n is None or r.n == n):
                return r
        raise KeyError((model_id, n))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model", "n"] + self.columns + ["m_mean", "m_sd", "N", "alpha", "seed"])
        for r in self.rows:
            w.writerow(
                [r.model_id, r.n]
                + [f"{x:.1f}" for x in r.rates]
                + [f"{r.m_mean:.2f}", f"{r.m_sd:.2f}", r.N, self.alpha, self.seed]
            )
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "H": self.H,
            "alpha": self.alpha,
            "seed": self.seed,
            "columns": self.columns,
            "rows": [
                {k: v for k, v in asdict(r).items() if k not in ("pvalues", "m_values")}
                for r in self.rows
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _one_run(args):
    cfg, model_id, n, run = args
    sim_seed, boot_seed = run_seeds(cfg.seed, model_id, n, run)
    try:
        series = simulate(get_model(model_id), cfg.T, cfg.G, cfg.burnin, seed=sim_seed)
        rep = stationarity_test(series, H=cfg.H, K=cfg.K, n=n, seed=boot_seed)
    except FStationarityError as exc:
        raise type(exc)(f"{exc} [model={model_id}, n={n}, run={run}, seed={cfg.seed}]") from exc
    p = np.concatenate([rep.per_hypothesis_p[:2], rep.p_combined])
    return p, rep.tuning["m"]


def run_monte_carlo(cfg: MonteCarloConfig, jobs: int = 1, progress=None) -> RateTable:
    """Rejection-rate table over models and bandwidths.

    A run rejects hypothesis family ``c`` when its p-value is strictly below
    ``cfg.alpha``. ``progress`` is an optional callable receiving a message
    per finished ``(model, n)`` cell.
    """
    cfg.validate()
    rows = []
    for model_id in cfg.models:
        for n in cfg.bandwidths():
            out = parallel_map(_one_run, [(cfg, model_id, n, r) for r in range(cfg.N)], jobs)
            P = np.array([o[0] for o in out])
            ms = [int(o[1]) for o in out]
            rates = (100.0 * np.mean(P < cfg.alpha, axis=0)).tolist()
            rows.append(
                RateRow(
                    model_id, n, rates, float(np.mean(ms)),
                    float(np.std(ms, ddof=1)) if len(ms) > 1 else 0.0,
                    cfg.N, P, ms,
                )
            )
            if progress:
                progress(f"{model_id} n={n}: done {cfg.N} runs")
    return RateTable(cfg.H, cfg.alpha, cfg.seed, rows)


def _one_measure(args):
    model_id, T, G, H, burnin, seed, run = args
    sim_seed, _ = run_seeds(seed, model_id, T, run)
    return nonstat_measures(simulate(get_model(model_id), T, G, burnin, seed=sim_seed), H)


def measure_study(model_id: str, T: int, N: int, H: int = 4, G: int = 100,
                  seed: int = 0, burnin: int = 100, jobs: int = 1) -> np.ndarray:
    """``N x (H + 2)`` array of non-stationarity measures of simulated series."""
    args = [(model_id, T, G, H, burnin, seed, r) for r in range(N)]
    return np.array(parallel_map(_one_measure, args, jobs))


def _one_blocklen(args):
    model_id, T, G, n, burnin, seed, run = args
    sim_seed, _ = run_seeds(seed, model_id, n, run)
    series = simulate(get_model(model_id), T, G, burnin, seed=sim_seed)
    return select_block_length(series, n).m


def blocklen_study(model_id: str, T: int, N: int, n: Optional[int] = None, G: int = 100,
                   seed: int = 0, burnin: int = 100, jobs: int = 1) -> np.ndarray:
    """Selected block lengths of ``N`` simulated series."""
    n = T if n is None else n
    args = [(model_id, T, G, n, burnin, seed, r) for r in range(N)]
    return np.array(parallel_map(_one_blocklen, args, jobs))
