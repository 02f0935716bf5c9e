"""Time-varying random-operator functional AR(1) simulator and the ten benchmark models.

The state is evolved as 17 Fourier coefficients and rendered onto the grid
at the end. Model families:

* ``M0``  stationary;
* ``Mm1..Mm3``  a scalar level ``a_j(t/T)`` added to every curve (mean change);
* ``Mv1..Mv3``  innovations scaled by ``a_j(t/T)`` (variance change);
* ``Ma1..Ma3``  operator scaled by ``a_j(t/T)`` (lag-1 dependence change).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .fda import FunctionalSeries, Grid

__all__ = [
    "N_BASIS",
    "MODEL_IDS",
    "TvrFarModel",
    "get_model",
    "fourier_basis_eval",
    "fourier_basis_matrix",
    "damping_fn",
    "draw_operator",
    "innovation_sd",
    "simulate",
    "simulate_coefficients",
]

N_BASIS = 17
MODEL_IDS = ("M0", "Mm1", "Mm2", "Mm3", "Mv1", "Mv2", "Mv3", "Ma1", "Ma2", "Ma3")


def damping_fn(j: int, u):
    """Profiles ``a_0..a_3`` on [0, 1], extended constantly outside."""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    if j == 0:
        out = np.ones_like(u)
    elif j == 1:
        out = 0.5 + u
    elif j == 2:
        out = 1.0 - 0.5 * np.cos(2.0 * np.pi * u)
    elif j == 3:
        out = 0.5 + (u >= 0.5)
    else:
        raise ValueError(f"profile index must be 0..3, got {j}")
    return float(out) if out.ndim == 0 else out


def fourier_basis_eval(i: int, tau):
    """``psi_0 = 1``, ``psi_{2n-1} = sqrt2 sin(2 pi n tau)``, ``psi_{2n} = sqrt2 cos(2 pi n tau)``."""
    if not 0 <= i < N_BASIS:
        raise IndexError(f"basis index must be 0..{N_BASIS - 1}, got {i}")
    tau = np.asarray(tau, dtype=float)
    if i == 0:
        out = np.ones_like(tau)
    else:
        freq = (i + 1) // 2
        trig = np.sin if i % 2 == 1 else np.cos
        out = math.sqrt(2.0) * trig(2.0 * np.pi * freq * tau)
    return float(out) if out.ndim == 0 else out


def fourier_basis_matrix(grid: Grid) -> np.ndarray:
    """``N_BASIS x G`` matrix of basis functions sampled on ``grid``."""
    return np.vstack([fourier_basis_eval(i, grid.points) for i in range(N_BASIS)])


@dataclass(frozen=True)
class TvrFarModel:
    """Declarative description of one benchmark model.

    ``mean_profile``, ``noise_profile`` and ``damping_profile`` index the
    profiles of :func:`damping_fn`; 0 means "constant 1" (or no mean shift).
    """

    model_id: str
    mean_profile: int = 0
    noise_profile: int = 0
    damping_profile: int = 0
    dim: int = N_BASIS

    def __post_init__(self):
        active = [p for p in (self.mean_profile, self.noise_profile, self.damping_profile) if p]
        if len(active) > 1:
            raise ConfigurationError("at most one profile may be non-trivial")
        if any(not 0 <= p <= 3 for p in (self.mean_profile, self.noise_profile, self.damping_profile)):
            raise ConfigurationError("profile indices must be 0..3")

    def mean_level(self, u):
        if self.mean_profile == 0:
            return np.zeros_like(np.asarray(u, dtype=float))
        return damping_fn(self.mean_profile, u)

    def noise_scale(self, u):
        return damping_fn(self.noise_profile, u)

    def damping(self, u):
        return damping_fn(self.damping_profile, u)


def get_model(model_id: str) -> TvrFarModel:
    """Look up one of ``M0, Mm1..3, Mv1..3, Ma1..3``."""
    if model_id not in MODEL_IDS:
        raise ConfigurationError(f"unknown model {model_id!r}; choose from {', '.join(MODEL_IDS)}")
    if model_id == "M0":
        return TvrFarModel("M0")
    family, j = model_id[1], int(model_id[2])
    key = {"m": "mean_profile", "v": "noise_profile", "a": "damping_profile"}[family]
    return TvrFarModel(model_id, **{key: j})


def innovation_sd(dim: int = N_BASIS) -> np.ndarray:
    """Standard deviations ``exp(-i/20)`` of the innovation coefficients."""
    return np.exp(-np.arange(dim) / 20.0)


def draw_operator(rng: np.random.Generator, dim: int = N_BASIS) -> np.ndarray:
    """Random coefficient matrix with entry variances ``exp(-i-j)`` and Frobenius norm 1/3."""
    idx = np.arange(dim)
    sd = np.exp(-(idx[:, None] + idx[None, :]) / 2.0)
    G = rng.standard_normal((dim, dim)) * sd
    return G / (3.0 * np.linalg.norm(G, "fro"))


def simulate_coefficients(
    model: TvrFarModel,
    T: int,
    operator: np.ndarray,
    innovations: np.ndarray,
    start: Optional[np.ndarray] = None,
    noise_off: bool = False,
) -> np.ndarray:
    """Run the coefficient recursion for given operator and innovations.

    ``innovations`` has ``burnin + T`` rows (unscaled, already with the per-
    coefficient standard deviations); row ``r`` drives time ``t = r - burnin + 1``.
    Returns the ``T x dim`` coefficients of times ``1..T``.
    """
    total = innovations.shape[0]
    burnin = total - T
    y = np.zeros(operator.shape[0]) if start is None else np.array(start, dtype=float)
    t = np.arange(1 - burnin, T + 1)
    u = t / T
    a = np.broadcast_to(model.damping(u), t.shape)
    s = np.broadcast_to(model.noise_scale(u), t.shape)
    At = operator.T
    out = np.empty((T, operator.shape[0]))
    for r in range(total):
        y = a[r] * (At @ y)
        if not noise_off:
            y = y + s[r] * innovations[r]
        if r >= burnin:
            out[r - burnin] = y
    return out


def simulate(
    model: TvrFarModel,
    T: int,
    G: int = 100,
    burnin: int = 100,
    seed=None,
    *,
    noise_off: bool = False,
) -> FunctionalSeries:
    """Simulate one series of ``T`` curves on a ``G``-point grid.

    A fresh operator is drawn for every call. ``noise_off`` is a test hook that
    zeroes the innovations.
    """
    if T < 2:
        raise ConfigurationError("T must be >= 2")
    if burnin < 0:
        raise ConfigurationError("burnin must be >= 0")
    rng = np.random.default_rng(seed)
    op = draw_operator(rng, model.dim)
    eps = rng.standard_normal((burnin + T, model.dim)) * innovation_sd(model.dim)
    coef = simulate_coefficients(model, T, op, eps, noise_off=noise_off)
    grid = Grid(G)
    curves = coef @ fourier_basis_matrix(grid)[: model.dim]
    level = np.broadcast_to(model.mean_level(np.arange(1, T + 1) / T), (T,))
    curves += level[:, None]
    return FunctionalSeries(curves, grid)
