"""Grid-sampled functional data and midpoint-rule L2 geometry on [0, 1]^d."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError

__all__ = ["Grid", "FunctionalSeries", "l2_inner", "field_l2_norm_sq"]


@dataclass(frozen=True)
class Grid:
    """Midpoint grid ``tau_g = (2g - 1) / (2G)`` with uniform weight ``1/G``."""

    G: int

    def __post_init__(self):
        if int(self.G) != self.G or self.G < 1:
            raise DimensionError(f"grid size must be a positive integer, got {self.G!r}")
        object.__setattr__(self, "G", int(self.G))

    @property
    def points(self) -> np.ndarray:
        return (2.0 * np.arange(1, self.G + 1) - 1.0) / (2.0 * self.G)

    @property
    def weight(self) -> float:
        return 1.0 / self.G


@dataclass(frozen=True)
class FunctionalSeries:
    """``T`` curves sampled on a common grid; row ``t`` holds observation ``t + 1``.

    The data array is copied and made read-only on construction.
    """

    data: np.ndarray
    grid: Grid = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        if data.ndim != 2:
            raise DimensionError(f"series data must be 2-D (T x G), got ndim={data.ndim}")
        grid = self.grid if self.grid is not None else Grid(data.shape[1])
        if data.shape[1] != grid.G:
            raise DimensionError(
                f"series has {data.shape[1]} samples per curve but grid has G={grid.G}"
            )
        if data.shape[0] < 2:
            raise DimensionError(f"a series needs T >= 2 curves, got {data.shape[0]}")
        if not np.all(np.isfinite(data)):
            raise DimensionError("series contains non-finite values")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "grid", grid)

    @property
    def T(self) -> int:
        return self.data.shape[0]

    @property
    def G(self) -> int:
        return self.grid.G

    def __len__(self):
        return self.T


def l2_inner(a: Sequence[float], b: Sequence[float], grid: Grid) -> float:
    """Midpoint-rule approximation of the L2 inner product of two curves."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (grid.G,) or b.shape != (grid.G,):
        raise DimensionError(
            f"curves of shape {a.shape} and {b.shape} do not match grid size {grid.G}"
        )
    return float(a @ b) / grid.G


def field_l2_norm_sq(values, weights: Sequence[float]) -> float:
    """Weighted sum of squares of a field sampled on a product grid.

    Parameters
    ----------
    values : array_like
        Field values, one array axis per coordinate.
    weights : sequence of float
        Quadrature weight of each axis (``1/G`` for a tau axis).
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != len(weights):
        raise DimensionError(
            f"field has {values.ndim} axes but {len(weights)} weights were given"
        )
    return float(np.sum(values * values) * np.prod(weights))
