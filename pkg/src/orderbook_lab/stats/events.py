"""Waiting times between trades and the return conditioned on them."""

from __future__ import annotations

import numpy as np
from scipy import stats

from ..core import PricePath
from .distributions import log_edges
from .series import StatSeries

ENDING, LITERAL = "ending", "literal"
MIN_TRADES = 100


def waiting_time_cdf(waits: np.ndarray) -> StatSeries:
    """Empirical CDF at each distinct waiting time."""
    vals, counts = np.unique(waits, return_counts=True)
    return StatSeries("waiting_time_cdf", vals, np.cumsum(counts) / len(waits), counts)


def conditional_return(waits: np.ndarray, returns: np.ndarray, ratio: float = 1.25,
                       min_count: int = 1) -> StatSeries:
    """Mean ``|r|`` in logarithmic bins of the waiting time."""
    waits = np.asarray(waits, dtype=float)
    ar = np.abs(np.asarray(returns, dtype=float))
    pos = waits > 0
    waits, ar = waits[pos], ar[pos]
    start = float(waits.min())
    edges = start * log_edges(waits.max() / start, ratio, 1.0, discrete=False)
    k = np.searchsorted(edges, waits, side="right") - 1
    counts = np.bincount(k, minlength=len(edges) - 1)
    sums = np.bincount(k, weights=ar, minlength=len(edges) - 1)
    keep = counts >= max(min_count, 1)
    centers = np.sqrt(edges[:-1] * edges[1:])
    return StatSeries("conditional_return", centers[keep], sums[keep] / counts[keep],
                      counts[keep], {"ratio": ratio})


def interevent_statistics(path: PricePath, ratio: float = 1.25, pairing: str = ENDING,
                          min_count: int = 1) -> tuple[StatSeries, StatSeries]:
    """Waiting-time CDF and the conditional mean absolute return.

    Waiting times are in model time units. With ``pairing='ending'`` the wait
    ``t_i - t_{i-1}`` is paired with the jump of the trade that ends it,
    ``x(t_i) - x(t_{i-1})``. With ``'literal'`` it is paired with the next
    per-trade return ``x(t_{i+1}) - x(t_i)``.
    """
    if path.n_trades < MIN_TRADES:
        raise ValueError(f"too few trades: {path.n_trades} (need {MIN_TRADES})")
    waits = path.waiting_times()
    price = path.trade_price.astype(np.float64)
    if pairing == ENDING:
        w, r = waits, np.diff(price)
    elif pairing == LITERAL:
        w, r = waits[:-1], np.diff(price)[1:]
    else:
        raise ValueError(f"unknown pairing {pairing!r}")
    cdf = waiting_time_cdf(waits)
    cond = conditional_return(w, r, ratio, min_count)
    meta = dict(path.meta, n_trades=path.n_trades)
    cdf.meta.update(meta, estimator="waiting_time_cdf")
    cond.meta.update(meta, estimator="conditional_return", pairing=pairing)
    return cdf, cond


def exponential_ks(waits, rate: float | None = None) -> tuple[float, float, float]:
    """KS test of waiting times against ``1 - exp(-rate t)``.

    ``rate`` defaults to the inverse sample mean. Returns ``(D, p, rate)``.
    """
    waits = np.asarray(waits, dtype=float)
    if rate is None:
        rate = 1.0 / waits.mean()
    res = stats.kstest(waits, "expon", args=(0, 1.0 / rate))
    return float(res.statistic), float(res.pvalue), float(rate)
