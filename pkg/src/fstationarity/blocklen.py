"""Data-driven block length for the multiplier bootstrap.

The block length minimises a plug-in estimate of the integrated MSE of the
bootstrap covariance estimator, ``m = (2 * delta * T / gamma) ** (1/3)``, where
``delta`` and ``gamma`` are built from local autocovariance kernels truncated
at an automatically chosen lag ``L``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .bootstrap import local_mean
from .errors import ConfigurationError, DegenerateSeriesError
from .fda import FunctionalSeries

__all__ = [
    "BlockLengthTrace",
    "local_autocov",
    "rho_threshold",
    "lag_window",
    "select_L",
    "select_block_length",
    "block_length_from_estimates",
]


@dataclass
class BlockLengthTrace:
    """Everything the block-length selector computed on its way to ``m``."""

    L: int
    rho: List[float]
    delta_hat: float
    gamma_hat: float
    m_hat_raw: float
    m: int
    K_T: int
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "rho": list(self.rho),
            "delta_hat": self.delta_hat,
            "gamma_hat": self.gamma_hat,
            "m_hat_raw": self.m_hat_raw,
            "m": self.m,
            "K_T": self.K_T,
            "warnings": list(self.warnings),
        }


def lag_window(T: int) -> int:
    """Number of consecutive negligible autocorrelations required after ``L``."""
    return max(5, math.ceil(math.sqrt(math.log(T))))


def rho_threshold(T: int) -> float:
    return 2.0 * math.sqrt(math.log(T) / T)


def _check_bandwidth(series: FunctionalSeries, n: int) -> None:
    if not 1 <= n <= series.T:
        raise ConfigurationError(f"bandwidth n must satisfy 1 <= n <= T={series.T}, got {n}")


def _windows(T: int, n: int, k: int, i: np.ndarray):
    # 1-based summation range of s = i + j for gamma_{i,k}
    lo = np.maximum(i - n, 1)
    hi = np.minimum(i + n, T - k)
    return lo, hi


def local_autocov(series: FunctionalSeries, n: int, i: int, k: int) -> np.ndarray:
    """Local lag-``k`` autocovariance kernel at time ``i`` (1-based), a ``G x G`` matrix.

    Each curve is centred by its own local mean before the lagged products are
    averaged over the window around ``i``. Negative lags return the transpose
    of the kernel at ``-k``.
    """
    _check_bandwidth(series, n)
    if k < 0:
        return local_autocov(series, n, i, -k).T
    T = series.T
    if not 1 <= i <= T - k:
        raise DegenerateSeriesError(
            f"local autocovariance at i={i}, k={k} reaches past the sample end T={T}"
        )
    Z = series.data - local_mean(series, n)
    lo, hi = _windows(T, n, k, np.array([i]))
    lo, hi = int(lo[0]), int(hi[0])
    a = Z[lo - 1 : hi]
    b = Z[lo - 1 + k : hi + k]
    return a.T @ b / (hi - lo + 1)


def _averaged_kernel(Z: np.ndarray, n: int, k: int, i: np.ndarray) -> np.ndarray:
    """``sum over i of gamma_{i,k}`` as one G x G matrix, via per-s weights."""
    T = Z.shape[0]
    lo, hi = _windows(T, n, k, i)
    inv = 1.0 / (hi - lo + 1)
    diff = np.zeros(T + 2)
    np.add.at(diff, lo, inv)
    np.add.at(diff, hi + 1, -inv)
    c = np.cumsum(diff)[1 : T - k + 1]
    return (Z[: T - k] * c[:, None]).T @ Z[k:]


def _kernel_norm(M: np.ndarray) -> float:
    G = M.shape[0]
    return float(np.sqrt(np.sum(M * M)) / G)


class _RhoSequence:
    def __init__(self, Z: np.ndarray, n: int):
        self.Z = Z
        self.n = n
        T = Z.shape[0]
        denom = _kernel_norm(_averaged_kernel(Z, n, 0, np.arange(1, T + 1)) / T)
        if not denom > 0.0:
            raise DegenerateSeriesError("degenerate series: local autocovariance vanishes")
        self.denom = denom
        self.values = [1.0]

    def __getitem__(self, k: int) -> float:
        T = self.Z.shape[0]
        while len(self.values) <= k:
            j = len(self.values)
            if j > T - 1:
                self.values.append(0.0)
                continue
            M = _averaged_kernel(self.Z, self.n, j, np.arange(1, T - j + 1)) / (T - j)
            self.values.append(_kernel_norm(M) / self.denom)
        return self.values[k]


def _centred(series: FunctionalSeries, n: int) -> np.ndarray:
    return series.data - local_mean(series, n)


def select_L(series: FunctionalSeries, n: int):
    """Smallest ``L >= 1`` after which ``K_T`` autocorrelation ratios are negligible.

    Returns
    -------
    L : int
    rho : list of float
        Ratios ``rho_0 .. rho_{L + K_T}``.
    warnings : list of str
    """
    _check_bandwidth(series, n)
    T = series.T
    if T < 8:
        raise ConfigurationError(f"block length selection needs T >= 8, got T={T}")
    rho = _RhoSequence(_centred(series, n), n)
    K_T = lag_window(T)
    thr = rho_threshold(T)
    L_max = T // 4
    warnings: List[str] = []
    chosen = None
    for L in range(1, L_max + 1):
        if all(rho[L + k] <= thr for k in range(1, K_T + 1)):
            chosen = L
            break
    if chosen is None:
        chosen = L_max
        warnings.append(f"no lag cutoff satisfied the rule up to L_max={L_max}; using L_max")
    rho[chosen + K_T]
    return chosen, rho.values[: chosen + K_T + 1], warnings


def block_length_from_estimates(delta_hat: float, gamma_hat: float, T: int):
    """``(m_hat_raw, m, warnings)`` from the bias and variance estimates."""
    warnings: List[str] = []
    if not gamma_hat > 0.0:
        warnings.append("gamma_hat vanished; falling back to m = 2")
        return float("nan"), 2, warnings
    raw = (2.0 * delta_hat * T / gamma_hat) ** (1.0 / 3.0)
    m = int(math.floor(raw + 0.5))
    m = min(max(m, 2), max(T // 4, 2))
    return raw, m, warnings


def select_block_length(series: FunctionalSeries, n: int) -> BlockLengthTrace:
    """Choose the bootstrap block length from the data."""
    T, G = series.T, series.G
    L, rho, warnings = select_L(series, n)
    if T <= 2 * L + 2:
        raise DegenerateSeriesError(f"T={T} too short for lag cutoff L={L}")
    Z = _centred(series, n)
    i = np.arange(L + 1, T - L + 1)
    span = T - 2 * L

    # sum over k = -L..L of gamma_{i,k}, one G x G kernel per i
    S = np.zeros((i.size, G, G))
    bias = np.zeros((G, G))
    for k in range(L + 1):
        lo, hi = _windows(T, n, k, i)
        prods = (Z[: T - k, :, None] * Z[k:, None, :])
        csum = np.zeros((T - k + 1, G, G))
        np.cumsum(prods, axis=0, out=csum[1:])
        gam = (csum[hi] - csum[lo - 1]) / (hi - lo + 1)[:, None, None]
        if k == 0:
            S += gam
        else:
            S += gam + gam.transpose(0, 2, 1)
            M = gam.sum(axis=0)
            bias += k * (M + M.T)
    bias /= span
    delta_hat = float(np.sum(bias * bias)) / G**2
    traces = np.einsum("igg->i", S) / G
    sq = np.einsum("iab,iab->i", S, S) / G**2
    gamma_hat = float((2.0 / 3.0) * np.sum(traces**2 + sq) / span)

    raw, m, w2 = block_length_from_estimates(delta_hat, gamma_hat, T)
    return BlockLengthTrace(
        L=L,
        rho=[float(r) for r in rho],
        delta_hat=delta_hat,
        gamma_hat=gamma_hat,
        m_hat_raw=raw,
        m=m,
        K_T=lag_window(T),
        warnings=warnings + w2,
    )
