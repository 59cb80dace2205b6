"""Estimators for simulated price paths."""

from .correlations import abs_return_autocorrelation, connected_correlation, return_autocorrelation
from .distributions import (Histogram, collapse_error, collapse_noise_floor, fit_collapse_scale,
                            lagged_abs_returns, linear_edges, log_edges, return_distribution,
                            scaling_factor_bps)
from .events import conditional_return, exponential_ks, interevent_statistics, waiting_time_cdf
from .fits import (CutoffTest, DecayFit, best_decay_law, fit_decay_laws, hill_alpha,
                   powerlaw_cutoff_test, powerlaw_slope)
from .hurst import hurst_normalized, hurst_simplified
from .series import StatSeries, log_lags, mean_volatility

__all__ = [
    "Histogram", "StatSeries", "CutoffTest", "DecayFit",
    "return_distribution", "lagged_abs_returns", "log_edges", "linear_edges",
    "scaling_factor_bps", "collapse_error", "fit_collapse_scale", "collapse_noise_floor",
    "abs_return_autocorrelation", "return_autocorrelation", "connected_correlation",
    "hurst_simplified", "hurst_normalized",
    "interevent_statistics", "waiting_time_cdf", "conditional_return", "exponential_ks",
    "powerlaw_slope", "hill_alpha", "powerlaw_cutoff_test", "fit_decay_laws", "best_decay_law",
    "log_lags", "mean_volatility",
]
