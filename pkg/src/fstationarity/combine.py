"""Combined bootstrap test: mid-rank p-values, inverse-normal combination, global p-value."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from .bootstrap import BootstrapEnsemble, individual_pvalue
from .errors import ConfigurationError

__all__ = [
    "WeightProfile",
    "TestReport",
    "midrank_pvalues",
    "inv_norm_cdf",
    "psi_combine",
    "combined_test",
    "combined_pvalue",
]

# Wichura (1988), algorithm AS 241 (PPND16); coefficients in ascending powers.
_A = (3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4, 2.5090809287301226727e3)
_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
      2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
      5.2264952788528545610e3)
_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4)
_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9)
_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15)


def _horner(coefs, x):
    acc = 0.0
    for c in reversed(coefs):
        acc = acc * x + c
    return acc


def _lower_quantile(p: float) -> float:
    # 0 < p <= 0.5
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        x = q * _horner(_A, r) / _horner(_B, r)
    else:
        r = math.sqrt(-math.log(p))
        if r <= 5.0:
            r -= 1.6
            x = -_horner(_C, r) / _horner(_D, r)
        else:
            r -= 5.0
            x = -_horner(_E, r) / _horner(_F, r)
    # one Newton step against the erfc-based CDF
    cdf = 0.5 * math.erfc(-x / math.sqrt(2.0))
    pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    if pdf > 0.0:
        x -= (cdf - p) / pdf
    return x


def _scalar_quantile(p: float) -> float:
    if not 0.0 < p < 1.0 or math.isnan(p):
        raise ValueError(f"inv_norm_cdf needs 0 < p < 1, got {p!r}")
    if p > 0.5:
        # 1 - p is exact for p in [0.5, 1]
        return -_lower_quantile(1.0 - p)
    return _lower_quantile(p)


def inv_norm_cdf(p):
    """Standard normal quantile function.

    Accepts a scalar or an array; raises ``ValueError`` outside ``(0, 1)``.
    """
    if np.ndim(p) == 0:
        return _scalar_quantile(float(p))
    arr = np.asarray(p, dtype=float)
    return np.array([_scalar_quantile(v) for v in arr.ravel()]).reshape(arr.shape)


@dataclass(frozen=True)
class WeightProfile:
    """Combination weights for the mean and lags ``0..H`` (index ``-1`` first)."""

    H: int
    w: np.ndarray

    @classmethod
    def default(cls, H: int) -> "WeightProfile":
        """Half/half for ``H = 0``; otherwise 1/3 each for mean and lag 0 and 1/(3H) per further lag."""
        if H < 0:
            raise ConfigurationError("H must be >= 0")
        if H == 0:
            return cls(0, np.array([0.5, 0.5]))
        return cls(H, np.array([1 / 3, 1 / 3] + [1 / (3 * H)] * H))

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.shape != (self.H + 2,):
            raise ConfigurationError(f"weight vector must have length H+2={self.H + 2}")
        if np.any(w <= 0):
            raise ConfigurationError("weights must be positive")
        object.__setattr__(self, "w", w)


def midrank_pvalues(ensemble: BootstrapEnsemble) -> np.ndarray:
    """``(K + 1) x (H + 2)`` p-values of every row against the ``K`` replicates.

    ``p[i, c] = (1/2 + #{k : S_k[c] >= S_i[c]}) / (K + 1)``; row 0 is the observed vector.
    """
    reps = ensemble.replicates
    K = reps.shape[0]
    stacked = ensemble.stacked()
    out = np.empty_like(stacked)
    for c in range(stacked.shape[1]):
        srt = np.sort(reps[:, c])
        exceed = K - np.searchsorted(srt, stacked[:, c], side="left")
        out[:, c] = (0.5 + exceed) / (K + 1)
    return out


def psi_combine(p, w: WeightProfile) -> float:
    """Weighted inverse-normal combination ``sum_i w_i * Phi^{-1}(1 - p_i)``."""
    p = np.asarray(p, dtype=float)
    if p.shape != w.w.shape:
        raise ConfigurationError(f"p has shape {p.shape}, weights {w.w.shape}")
    return float(np.dot(w.w, inv_norm_cdf(1.0 - p)))


def _global_p(W: np.ndarray) -> float:
    return float(np.mean(W[1:] >= W[0]))


def combined_pvalue(z: np.ndarray, H: int) -> tuple[np.ndarray, float]:
    """Global p-value using the first ``H + 2`` columns of ``z = Phi^{-1}(1 - p)``."""
    w = WeightProfile.default(H).w
    W = z[:, : H + 2] @ w
    return W, _global_p(W)


@dataclass
class TestReport:
    """Outcome of the combined test.

    ``p_combined[h]`` is the global p-value of the combined test with maximal
    lag ``h``; ``global_p`` equals ``p_combined[-1]``.
    """

    __test__ = False  # not a pytest class

    per_hypothesis_p: np.ndarray
    individual_p: np.ndarray
    combined_W: float
    global_p: float
    p_combined: np.ndarray
    tuning: Dict[str, Any] = field(default_factory=dict)
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def H(self) -> int:
        return len(self.per_hypothesis_p) - 2

    def rejects(self, alpha: float = 0.05, hypothesis: Optional[int] = None) -> bool:
        """Strict ``p < alpha`` rejection.

        ``hypothesis=None`` uses the global p-value; ``-1..H`` the individual
        mid-rank p-value of the mean or lag ``h``.
        """
        if hypothesis is None:
            return self.global_p < alpha
        return self.per_hypothesis_p[hypothesis + 1] < alpha


def combined_test(ensemble: BootstrapEnsemble) -> TestReport:
    """Run the combined bootstrap test on a precomputed ensemble."""
    P = midrank_pvalues(ensemble)
    z = inv_norm_cdf(1.0 - P)
    H = ensemble.H
    p_comb = np.array([combined_pvalue(z, h)[1] for h in range(H + 1)])
    W, gp = combined_pvalue(z, H)
    indiv = np.array([individual_pvalue(ensemble, h) for h in range(-1, H + 1)])
    return TestReport(
        per_hypothesis_p=P[0].copy(),
        individual_p=indiv,
        combined_W=float(W[0]),
        global_p=gp,
        p_combined=p_comb,
    )
