"""Bootstrap tests for second-order stationarity of functional time series."""

__version__ = "0.1.0"

from .blocklen import BlockLengthTrace, select_block_length, select_L  # noqa: E402
from .bootstrap import BootstrapConfig, BootstrapEnsemble, bootstrap_ensemble  # noqa: E402
from .combine import TestReport, WeightProfile, combined_test, inv_norm_cdf  # noqa: E402
from .cusum import cusum_lag, cusum_mean, nonstat_measures, stat_l2  # noqa: E402
from .fda import FunctionalSeries, Grid  # noqa: E402
from .pipeline import stationarity_test  # noqa: E402
from .simgen import get_model, simulate  # noqa: E402

__all__ = [
    "BlockLengthTrace",
    "BootstrapConfig",
    "BootstrapEnsemble",
    "FunctionalSeries",
    "Grid",
    "TestReport",
    "WeightProfile",
    "bootstrap_ensemble",
    "combined_test",
    "cusum_lag",
    "cusum_mean",
    "get_model",
    "inv_norm_cdf",
    "nonstat_measures",
    "select_L",
    "select_block_length",
    "simulate",
    "stat_l2",
    "stationarity_test",
]
