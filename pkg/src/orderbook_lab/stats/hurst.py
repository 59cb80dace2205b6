"""Price-range statistics over windows of length dt.

The simplified statistic is the mean of ``max x - min x`` over a window of
``dt + 1`` consecutive samples. The normalized one divides each window's
range by the standard deviation of the ``dt`` one-step returns inside it.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..core import PricePath
from .series import StatSeries


_BLOCK = 1 << 22  # window elements per block


def _prices(path) -> tuple[np.ndarray, float, dict]:
    if isinstance(path, PricePath):
        x, dt, meta = path.x, path.dt, dict(path.meta)
    else:
        x, dt, meta = np.asarray(path), 1.0, {}
    if not np.issubdtype(x.dtype, np.integer):
        x = x.astype(np.float64)
    return x, dt, meta


def _windows(x: np.ndarray, lag: int, overlap: bool) -> np.ndarray:
    if lag < 1:
        raise ValueError("lags must be >= 1")
    if len(x) < lag + 1:
        raise ValueError(f"window too short: {len(x)} samples for lag {lag}")
    stride = max(1, lag // 4) if overlap else lag
    return sliding_window_view(x, lag + 1)[::stride]


def _blocks(w: np.ndarray):
    """Row blocks of a window view, bounding the temporaries."""
    rows = max(1, _BLOCK // w.shape[1])
    for lo in range(0, len(w), rows):
        yield w[lo:lo + rows]


def hurst_simplified(path, lags: Sequence[int], overlap: bool = False) -> StatSeries:
    """Mean price range against the window length (in model time units)."""
    x, dt, meta = _prices(path)
    lags = np.unique(np.asarray(lags, dtype=np.int64))
    y = np.empty(len(lags))
    n = np.empty(len(lags), dtype=np.int64)
    for i, k in enumerate(lags):
        w = _windows(x, int(k), overlap)
        total = 0.0
        for blk in _blocks(w):
            total += float((blk.max(axis=1) - blk.min(axis=1)).sum())
        y[i] = total / len(w)
        n[i] = len(w)
    return StatSeries("hurst_simplified", lags * dt, y, n,
                      dict(meta, estimator="hurst_simplified", overlap=overlap, window=len(x)))


def hurst_normalized(path, lags: Sequence[int], overlap: bool = False) -> StatSeries:
    """Range over in-window return standard deviation, averaged over windows.

    Windows without any price change have zero variance; they are left out
    and the left-out fraction per lag goes into ``meta['excluded_fraction']``.
    Lags where every window is left out are dropped; if none remain this
    raises.
    """
    x, dt, meta = _prices(path)
    lags = np.unique(np.asarray(lags, dtype=np.int64))
    xs, ys, ns, excluded = [], [], [], {}
    for k in lags:
        w = _windows(x, int(k), overlap)
        total, kept = 0.0, 0
        for blk in _blocks(w):
            rng_ = (blk.max(axis=1) - blk.min(axis=1)).astype(np.float64)
            sd = np.diff(blk, axis=1).astype(np.float64).std(axis=1)
            ok = sd > 0
            total += float((rng_[ok] / sd[ok]).sum())
            kept += int(ok.sum())
        excluded[int(k)] = float(1 - kept / len(w))
        if kept:
            xs.append(k * dt)
            ys.append(total / kept)
            ns.append(kept)
    if not xs:
        raise ValueError("all windows excluded: zero return variance at every lag")
    return StatSeries("hurst_normalized", xs, ys, ns,
                      dict(meta, estimator="hurst_normalized", overlap=overlap, window=len(x),
                           excluded_fraction=excluded))
