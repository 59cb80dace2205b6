"""Connected return autocorrelations."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..core import PricePath
from .series import StatSeries

_BLOCK = 1 << 20


def _series(path_or_returns) -> tuple[np.ndarray, dict]:
    if isinstance(path_or_returns, PricePath):
        return path_or_returns.returns().astype(np.float64), dict(path_or_returns.meta)
    return np.asarray(path_or_returns, dtype=np.float64), {}


def connected_correlation(r: np.ndarray, lags: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """``<r_t r_{t-lag}> - <r_t><r_{t-lag}>`` with means over the overlapping pairs."""
    lags = np.asarray(lags, dtype=np.int64)
    if len(lags) == 0:
        raise ValueError("no lags")
    if lags.min() < 1:
        raise ValueError("lags must be >= 1")
    if len(r) < 10 * lags.max():
        raise ValueError(f"window too short: {len(r)} returns for max lag {lags.max()} "
                         f"(need >= {10 * lags.max()})")
    c = np.empty(len(lags))
    n = np.empty(len(lags), dtype=np.int64)
    buf = np.empty(min(_BLOCK, len(r)))
    for i, k in enumerate(lags):
        a, b = r[k:], r[:-k]
        m = len(a)
        # fixed-size blocks bound the temporary and fix the summation order
        prod = 0.0
        for lo in range(0, m, _BLOCK):
            hi = min(lo + _BLOCK, m)
            out = buf[:hi - lo]
            np.multiply(a[lo:hi], b[lo:hi], out=out)
            prod += out.sum()
        c[i] = prod / m - a.mean() * b.mean()
        n[i] = m
    return c, n


def abs_return_autocorrelation(path, lags: Sequence[int]) -> StatSeries:
    """Connected autocorrelation of ``|r_t|``, zero-return steps included."""
    r, meta = _series(path)
    lags = np.unique(np.asarray(lags, dtype=np.int64))
    c, n = connected_correlation(np.abs(r, out=r), lags)
    return StatSeries("abs_return_autocorrelation", lags, c, n,
                      dict(meta, estimator="abs_return_autocorrelation", window=len(r)))


def return_autocorrelation(path, lags: Sequence[int]) -> StatSeries:
    """Connected autocorrelation of the signed returns."""
    r, meta = _series(path)
    lags = np.unique(np.asarray(lags, dtype=np.int64))
    c, n = connected_correlation(r, lags)
    return StatSeries("return_autocorrelation", lags, c, n,
                      dict(meta, estimator="return_autocorrelation", window=len(r)))
