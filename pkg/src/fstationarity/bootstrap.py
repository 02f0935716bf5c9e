"""Dependent block multiplier bootstrap for the joint vector of CUSUM statistics.

Every replicate ``k`` draws one vector of standard normal multipliers and uses
it for the mean statistic and for all lag statistics, so the ``H + 2``
coordinates of a replicate are coupled the same way the observed ones are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .cusum import CusumDecomposition, check_lag, cusum_lag, cusum_mean, lag_products, piecewise_l2_sq, stat_l2
from .errors import ConfigurationError
from .fda import FunctionalSeries

__all__ = [
    "BootstrapConfig",
    "BootstrapEnsemble",
    "MultiplierSource",
    "default_bandwidth",
    "seeded_multipliers",
    "local_mean",
    "local_cross_mean",
    "window_means",
    "bootstrap_ensemble",
    "bootstrap_process",
    "individual_pvalue",
]

#: ``(k, T) -> array of T multipliers`` for replicate ``k`` (1-based).
MultiplierSource = Callable[[int, int], np.ndarray]


def default_bandwidth(T: int) -> int:
    """Local-mean bandwidth used when none is given: ``min(ceil(T/4), 90)``."""
    return max(1, min(math.ceil(T / 4), 90))


@dataclass(frozen=True)
class BootstrapConfig:
    """Tuning parameters of the multiplier bootstrap.

    Attributes
    ----------
    m : int
        Block length.
    n : int
        Half-width of the local mean windows.
    H : int
        Largest lag tested.
    K : int
        Number of bootstrap replicates.
    seed : int
        Root seed of the multiplier streams, ``0 <= seed < 2**64``.
    """

    m: int
    n: int
    H: int
    K: int
    seed: int

    def validate(self, T: int) -> None:
        for name in ("m", "n", "H", "K", "seed"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ConfigurationError(f"{name} must be an integer, got {value!r}")
        if self.K < 1:
            raise ConfigurationError("K must be >= 1")
        if not 1 <= self.m <= T:
            raise ConfigurationError(f"block length m must satisfy 1 <= m <= T={T}, got {self.m}")
        if not 1 <= self.n <= T:
            raise ConfigurationError(f"bandwidth n must satisfy 1 <= n <= T={T}, got {self.n}")
        if not 0 <= self.H <= T - 2:
            raise ConfigurationError(f"H must satisfy 0 <= H <= T-2={T - 2}, got {self.H}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must lie in [0, 2**64)")


@dataclass(frozen=True)
class BootstrapEnsemble:
    """Observed statistics and their bootstrap replicates.

    ``observed[0]`` is the mean statistic and ``observed[h + 1]`` the lag-``h``
    statistic; ``replicates`` has one row per replicate in the same layout.
    """

    observed: np.ndarray
    replicates: np.ndarray
    config: BootstrapConfig

    @property
    def K(self) -> int:
        return self.replicates.shape[0]

    @property
    def H(self) -> int:
        return self.observed.shape[0] - 2

    def stacked(self) -> np.ndarray:
        """``(K + 1) x (H + 2)`` array with the observed vector as row 0."""
        return np.vstack([self.observed[None, :], self.replicates])


def seeded_multipliers(seed: int) -> MultiplierSource:
    """Multiplier source with one independent stream per replicate.

    Stream ``k`` is a PCG64 generator seeded by ``SeedSequence([seed, k])``, so
    any replicate can be regenerated on its own and the result does not depend
    on the order in which replicates are produced.
    """

    def draw(k: int, T: int) -> np.ndarray:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, k])))
        return rng.standard_normal(T)

    return draw


def window_means(terms: np.ndarray, n: int) -> np.ndarray:
    """Average of ``terms[s]`` over ``max(t - n, 1) <= s <= min(t + n, T_eff)`` for each ``t``.

    Indices are 1-based as in the window definitions; ``terms`` has ``T_eff`` rows.
    """
    t_eff = terms.shape[0]
    csum = np.zeros((t_eff + 1,) + terms.shape[1:])
    np.cumsum(terms, axis=0, out=csum[1:])
    t = np.arange(1, t_eff + 1)
    lo = np.maximum(t - n, 1)
    hi = np.minimum(t + n, t_eff)
    counts = (hi - lo + 1).astype(float)
    return (csum[hi] - csum[lo - 1]) / counts.reshape((-1,) + (1,) * (terms.ndim - 1))


def local_mean(series: FunctionalSeries, n: int) -> np.ndarray:
    """Local mean curves; row ``t`` averages the curves within ``n`` steps of ``t``."""
    if not 1 <= n <= series.T:
        raise ConfigurationError(f"bandwidth n must satisfy 1 <= n <= T={series.T}, got {n}")
    return window_means(series.data, n)


def local_cross_mean(series: FunctionalSeries, n: int, h: int) -> np.ndarray:
    """Local means of the lag-``h`` products, shape ``(T - h, G**2)``.

    The window of row ``t`` is clipped on the right at ``T - h`` so that every
    product ``X_s (x) X_{s+h}`` stays inside the sample.
    """
    check_lag(series.T, h)
    if not 1 <= n <= series.T:
        raise ConfigurationError(f"bandwidth n must satisfy 1 <= n <= T={series.T}, got {n}")
    return window_means(lag_products(series.data, h), n)


def _block_sums(centered: np.ndarray, m: int) -> np.ndarray:
    t_eff = centered.shape[0]
    csum = np.zeros((t_eff + 1,) + centered.shape[1:])
    np.cumsum(centered, axis=0, out=csum[1:])
    i = np.arange(1, t_eff + 1)
    return csum[np.minimum(i + m - 1, t_eff)] - csum[i - 1]


def _replicate_norms(gram: np.ndarray, R: np.ndarray, T: int, scale: float) -> np.ndarray:
    """Exact L2 norms of ``G(u) = C(u) - u C(1)`` for every column of ``R``.

    ``C(u) = sum_{i <= min(floor(uT), n)} R_i W_i`` where ``gram[i, i'] = <W_i, W_i'>``
    and ``n = gram.shape[0]``. Only inner products of the block sums are needed.
    """
    n = gram.shape[0]
    R = R[:n]
    full = gram @ R
    b_sq = np.einsum("ik,ik->k", R, full)
    cross = np.zeros((n + 1, R.shape[1]))
    np.cumsum(R * full, axis=0, out=cross[1:])
    lower = np.tril(gram, -1) @ R
    sq = np.zeros((n + 1, R.shape[1]))
    np.cumsum(2.0 * R * lower + R * R * np.diag(gram)[:, None], axis=0, out=sq[1:])

    idx = np.minimum(np.arange(T), n)
    frac = (np.arange(T) / T)[:, None]
    sq, cross = sq[idx], cross[idx]
    v_sq = sq - 2.0 * frac * cross + frac**2 * b_sq
    v_cross = cross - frac * b_sq
    val = piecewise_l2_sq(v_sq, v_cross, b_sq, T) * scale
    return np.sqrt(np.clip(val, 0.0, None))


def _statistic_replicates(terms, n, m, T, weight, R) -> np.ndarray:
    centered = terms - window_means(terms, n)
    W = _block_sums(centered, m)
    gram = W @ W.T
    return _replicate_norms(gram, R, T, weight / (m * T))


def bootstrap_ensemble(
    series: FunctionalSeries,
    cfg: BootstrapConfig,
    multipliers: Optional[MultiplierSource] = None,
) -> BootstrapEnsemble:
    """Observed CUSUM statistics and ``cfg.K`` joint multiplier-bootstrap replicates.

    Parameters
    ----------
    series : FunctionalSeries
    cfg : BootstrapConfig
    multipliers : callable, optional
        Test hook replacing the seeded normal multipliers; called as
        ``multipliers(k, T)`` for ``k = 1..K``.
    """
    T, G = series.T, series.G
    cfg.validate(T)
    draw = multipliers if multipliers is not None else seeded_multipliers(int(cfg.seed))
    R = np.empty((T, cfg.K))
    for k in range(1, cfg.K + 1):
        r = np.asarray(draw(k, T), dtype=float)
        if r.shape != (T,):
            raise ConfigurationError(f"multiplier source returned shape {r.shape}, expected ({T},)")
        R[:, k - 1] = r

    observed = [stat_l2(cusum_mean(series))]
    reps = [_statistic_replicates(series.data, cfg.n, cfg.m, T, 1.0 / G, R)]
    for h in range(cfg.H + 1):
        observed.append(stat_l2(cusum_lag(series, h)))
        reps.append(
            _statistic_replicates(lag_products(series.data, h), cfg.n, cfg.m, T, 1.0 / G**2, R)
        )
    return BootstrapEnsemble(np.asarray(observed), np.column_stack(reps), cfg)


def bootstrap_process(
    series: FunctionalSeries,
    cfg: BootstrapConfig,
    k: int,
    stat: int = -1,
    multipliers: Optional[MultiplierSource] = None,
) -> CusumDecomposition:
    """Replicate ``k`` of one bootstrap process, built explicitly.

    Returns the partial sums ``B(j/T)``, ``j = 0..T``, of the mean process
    (``stat = -1``) or of the lag-``stat`` process, packed as a
    :class:`CusumDecomposition` so that :func:`stat_l2` gives its statistic.
    Slower than :func:`bootstrap_ensemble`; meant for inspection and checks.
    """
    T, G = series.T, series.G
    cfg.validate(T)
    draw = multipliers if multipliers is not None else seeded_multipliers(int(cfg.seed))
    r = np.asarray(draw(k, T), dtype=float)
    if stat == -1:
        terms, kind, h = series.data, "mean", None
    else:
        check_lag(T, stat)
        terms, kind, h = lag_products(series.data, stat), "lag", stat
    W = _block_sums(terms - window_means(terms, cfg.n), cfg.m)
    t_eff = W.shape[0]
    partials = np.zeros((T + 1, W.shape[1]))
    np.cumsum(r[:t_eff, None] * W, axis=0, out=partials[1 : t_eff + 1])
    partials[t_eff + 1 :] = partials[t_eff]
    partials /= np.sqrt(cfg.m * T)
    return CusumDecomposition(kind, partials, partials[T].copy(), T, G, h=h)


def individual_pvalue(ensemble: BootstrapEnsemble, h_index: int) -> float:
    """Share of replicates at least as large as the observed statistic.

    ``h_index = -1`` selects the mean statistic, ``h_index = h`` lag ``h``.
    """
    if not -1 <= h_index <= ensemble.H:
        raise IndexError(f"h_index must lie in -1..{ensemble.H}, got {h_index}")
    col = h_index + 1
    return float(np.mean(ensemble.replicates[:, col] >= ensemble.observed[col]))
