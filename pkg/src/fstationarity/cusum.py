"""CUSUM processes for the mean and the lag-h cross moments of a functional series.

A CUSUM process is stored through its partial sums ``A_j`` (``j = 0..T``) and
the full sum ``B``. Its value at rescaled time ``u`` is ``A_{floor(uT)} - u B``,
which is linear in ``u`` on every interval ``[j/T, (j+1)/T)``, so its squared
L2 norm in ``u`` can be integrated exactly interval by interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .errors import ConfigurationError, InvalidLagError
from .fda import FunctionalSeries

__all__ = [
    "CusumDecomposition",
    "MAX_LAG_ENTRIES",
    "cusum_mean",
    "cusum_lag",
    "lag_products",
    "piecewise_l2_sq",
    "stat_l2",
    "stat_l2_riemann",
    "nonstat_measures",
    "check_lag",
]

# refuse lag decompositions with more than this many stored floats
MAX_LAG_ENTRIES = 10**8


@dataclass(frozen=True)
class CusumDecomposition:
    """Partial sums of a CUSUM process.

    Attributes
    ----------
    kind : {"mean", "lag"}
    partials : ndarray, shape (T + 1, D)
        Row ``j`` is ``A_j``; ``D = G`` for the mean and ``G**2`` for a lag.
    total : ndarray, shape (D,)
        The full-sample sum ``B``.
    T : int
    G : int
    h : int or None
        Lag, when ``kind == "lag"``.
    """

    kind: Literal["mean", "lag"]
    partials: np.ndarray
    total: np.ndarray
    T: int
    G: int
    h: Optional[int] = None

    @property
    def weight(self) -> float:
        """Quadrature weight of one cell of the tau (or tau1 x tau2) grid."""
        d = 1 if self.kind == "mean" else 2
        return float(self.G) ** (-d)

    def evaluate(self, u: float) -> np.ndarray:
        """Return ``U(u, .)`` as a flat array of length ``D``."""
        j = min(int(np.floor(u * self.T)), self.T)
        return self.partials[j] - u * self.total


def check_lag(T: int, h: int) -> None:
    if int(h) != h or h < 0 or h > T - 2:
        raise InvalidLagError(f"lag h={h} outside 0..T-2 for T={T}")


def lag_products(data: np.ndarray, h: int) -> np.ndarray:
    """Flattened outer products ``X_t (x) X_{t+h}`` for ``t = 1..T-h``."""
    T, G = data.shape
    return (data[: T - h, :, None] * data[h:, None, :]).reshape(T - h, G * G)


def _decompose(terms: np.ndarray, T: int) -> tuple[np.ndarray, np.ndarray]:
    t_eff, D = terms.shape
    partials = np.zeros((T + 1, D))
    np.cumsum(terms, axis=0, out=partials[1 : t_eff + 1])
    partials[t_eff + 1 :] = partials[t_eff]
    partials /= np.sqrt(T)
    return partials, partials[T].copy()


def cusum_mean(series: FunctionalSeries) -> CusumDecomposition:
    """CUSUM process of the raw curves."""
    partials, total = _decompose(series.data, series.T)
    return CusumDecomposition("mean", partials, total, series.T, series.G)


def cusum_lag(series: FunctionalSeries, h: int) -> CusumDecomposition:
    """CUSUM process of the lag-``h`` products ``X_t (x) X_{t+h}``."""
    T, G = series.T, series.G
    check_lag(T, h)
    if (T + 1) * G * G > MAX_LAG_ENTRIES:
        raise ConfigurationError(
            f"lag decomposition would store (T+1)*G^2 = {(T + 1) * G * G} floats, "
            f"above the cap of {MAX_LAG_ENTRIES}; reduce the grid size"
        )
    partials, total = _decompose(lag_products(series.data, h), T)
    return CusumDecomposition("lag", partials, total, T, G, h=int(h))


def piecewise_l2_sq(v_sq, v_cross, b_sq, T: int):
    """Exact integral over ``u`` of a piecewise linear CUSUM norm.

    On ``[j/T, (j+1)/T)`` the process equals ``V_j - s B`` with
    ``V_j = A_j - (j/T) B`` and ``s = u - j/T`` in ``[0, 1/T)``.

    Parameters
    ----------
    v_sq : array_like, shape (T, ...)
        ``||V_j||^2`` for ``j = 0..T-1``.
    v_cross : array_like, shape (T, ...)
        ``<V_j, B>``.
    b_sq : array_like, shape (...)
        ``||B||^2``.
    """
    v_sq = np.asarray(v_sq)
    v_cross = np.asarray(v_cross)
    return v_sq.sum(axis=0) / T - v_cross.sum(axis=0) / T**2 + np.asarray(b_sq) / (3.0 * T**2)


def stat_l2(c: CusumDecomposition) -> float:
    """L2 norm of the CUSUM process over ``u`` and the tau grid."""
    T = c.T
    frac = np.arange(T) / T
    V = c.partials[:T] - frac[:, None] * c.total
    val = piecewise_l2_sq(
        np.einsum("jd,jd->j", V, V), V @ c.total, c.total @ c.total, T
    )
    return float(np.sqrt(max(val * c.weight, 0.0)))


def stat_l2_riemann(c: CusumDecomposition, subdiv: int, chunk: int = 4096) -> float:
    """Midpoint Riemann sum over ``subdiv`` points in ``u`` of the same norm."""
    if subdiv < 1:
        raise ConfigurationError("subdiv must be positive")
    acc = 0.0
    for start in range(0, subdiv, chunk):
        u = (np.arange(start, min(start + chunk, subdiv)) + 0.5) / subdiv
        idx = np.minimum(np.floor(u * c.T).astype(np.int64), c.T)
        U = c.partials[idx] - u[:, None] * c.total
        acc += float(np.sum(U * U))
    return float(np.sqrt(acc / subdiv * c.weight))


def nonstat_measures(series: FunctionalSeries, H: int) -> np.ndarray:
    """Plug-in non-stationarity measures ``||U_T|| / sqrt(T)`` and ``||U_{T,h}|| / sqrt(T)``.

    Returns an array of length ``H + 2``: mean first, then lags ``0..H``.
    """
    if H > series.T - 2:
        raise InvalidLagError(f"H={H} exceeds T-2={series.T - 2}")
    out = [stat_l2(cusum_mean(series))]
    out += [stat_l2(cusum_lag(series, h)) for h in range(H + 1)]
    return np.asarray(out) / np.sqrt(series.T)
