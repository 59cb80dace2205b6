"""Return histograms, the BPS scaling factor and scaling-collapse diagnostics."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from ..core import PricePath
from .series import StatSeries

LOG, LINEAR = "log", "linear"
PER_STEP, PER_TRADE = "step", "trade"


def log_edges(vmax: float, ratio: float = 1.25, start: float = 1.0,
              discrete: bool = True) -> np.ndarray:
    """Geometric bin edges from ``start`` past ``vmax``.

    For integer data the edges are floored and deduplicated so that every
    bin ``[e_k, e_k+1)`` holds at least one integer.
    """
    if ratio <= 1:
        raise ValueError("ratio must exceed 1")
    n = int(np.ceil(np.log(max(vmax, start) / start) / np.log(ratio))) + 2
    edges = start * ratio ** np.arange(n)
    if discrete:
        edges = np.unique(np.floor(edges))
        if edges[-1] <= vmax:
            edges = np.append(edges, np.floor(vmax) + 1)
    return edges


def linear_edges(vmax: float, width: float, start: float = 1.0) -> np.ndarray:
    n = int(np.floor((vmax - start) / width)) + 2
    return start + width * np.arange(max(n, 2))


@dataclass
class Histogram:
    """Density of |r| per unit r; values below the first edge are excluded."""

    edges: np.ndarray
    counts: np.ndarray
    total: int
    binning: str = LOG
    discrete: bool = True
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_samples(cls, values, binning: str = LOG, ratio: float = 1.25,
                     width: Optional[float] = None, start: float = 1.0,
                     discrete: bool = True, edges: Optional[np.ndarray] = None) -> "Histogram":
        values = np.asarray(values)
        vmax = max(float(values.max()), start) if len(values) else start
        if edges is None:
            if binning == LOG:
                edges = log_edges(vmax, ratio, start, discrete)
            elif binning == LINEAR:
                edges = linear_edges(vmax, width or 1.0, start)
            else:
                raise ValueError(f"unknown binning {binning!r}")
        counts, _ = np.histogram(values, bins=edges)
        # np.histogram closes the last bin; keep it half-open like the others
        counts[-1] -= np.count_nonzero(values == edges[-1])
        return cls(np.asarray(edges, dtype=float), counts.astype(np.int64), len(values),
                   binning, discrete, {"ratio": ratio} if binning == LOG else {"width": width})

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def density(self) -> np.ndarray:
        if self.total == 0:
            return np.zeros(len(self.counts))
        return self.counts / (self.total * self.widths)

    @property
    def excluded_mass(self) -> float:
        if self.total == 0:
            return 1.0
        return (self.total - int(self.counts.sum())) / self.total

    @property
    def centers(self) -> np.ndarray:
        lo, hi = self.edges[:-1], self.edges[1:]
        if self.discrete:
            return np.sqrt(lo * (hi - 1)) if self.binning == LOG else 0.5 * (lo + hi - 1)
        return np.sqrt(lo * hi) if self.binning == LOG else 0.5 * (lo + hi)

    def curve(self, min_count: int = 1) -> tuple[np.ndarray, np.ndarray]:
        keep = self.counts >= max(min_count, 1)
        return self.centers[keep], self.density[keep]

    def to_series(self, name: str = "return_distribution", min_count: int = 1) -> StatSeries:
        keep = self.counts >= max(min_count, 1)
        meta = dict(self.meta, binning=self.binning, total=self.total,
                    excluded_mass=self.excluded_mass)
        return StatSeries(name, self.centers[keep], self.density[keep], self.counts[keep], meta)


def lagged_abs_returns(path: PricePath, lag: int, mode: str = PER_STEP) -> np.ndarray:
    if mode == PER_STEP:
        x = path.x
    elif mode == PER_TRADE:
        x = path.trade_price
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if lag < 1:
        raise ValueError("lag must be >= 1")
    if len(x) <= lag:
        raise ValueError(f"empty window: series of length {len(x)} at lag {lag}")
    return np.abs(x[lag:] - x[:-lag])


def return_distribution(path: PricePath, lags: Sequence[int] = (1,), mode: str = PER_STEP,
                        binning: str = LOG, ratio: float = 1.25,
                        width: Optional[float] = None) -> dict[int, Histogram]:
    """Histogram of ``|x_t - x_{t-lag}|`` over the recorded window, per lag.

    ``mode='trade'`` measures lags in trades on the trade-price sequence,
    so lag 1 gives the one-trade returns ``x(t_{i+1}) - x(t_i)``.
    """
    out = {}
    for lag in lags:
        r = lagged_abs_returns(path, int(lag), mode)
        h = Histogram.from_samples(r, binning=binning, ratio=ratio, width=width)
        h.meta.update(lag=int(lag), mode=mode)
        out[int(lag)] = h
    return out


def scaling_factor_bps(L: float, N: float) -> float:
    """BPS return scale ``N**(1/2) * L**(-1/4)``."""
    if L < 1 or N < 1:
        raise ValueError("L and N must be >= 1")
    return float(np.sqrt(N) * L ** -0.25)


def _pair_error(c1, c2, npoints: int) -> float:
    (x1, y1), (x2, y2) = c1, c2
    lo, hi = max(x1[0], x2[0]), min(x1[-1], x2[-1])
    if not hi > lo:
        raise ValueError("disjoint supports")
    grid = np.log(np.geomspace(lo, hi, npoints))
    f1 = np.interp(grid, np.log(x1), np.log(y1))
    f2 = np.interp(grid, np.log(x2), np.log(y2))
    return float(np.mean(np.abs(f1 - f2)))


def _rescaled(h: Histogram, s: float, min_count: int):
    x, y = h.curve(min_count)
    if len(x) < 2:
        raise ValueError("histogram has fewer than two populated bins")
    return x / s, y * s


def collapse_error(hists: Sequence[Histogram], scales: Optional[Sequence[float]] = None,
                   min_count: int = 5, npoints: int = 40) -> float:
    """Largest pairwise mean |ln density| gap after rescaling ``P -> s P(r/s)``.

    Each pair is compared on the overlap of its supports; bins with fewer
    than ``min_count`` samples are dropped first. Zero means perfect collapse.
    """
    if len(hists) < 2:
        raise ValueError("need at least two histograms")
    scales = [1.0] * len(hists) if scales is None else list(scales)
    curves = [_rescaled(h, s, min_count) for h, s in zip(hists, scales)]
    return max(_pair_error(a, b, npoints) for a, b in itertools.combinations(curves, 2))


def fit_collapse_scale(ref: Histogram, other: Histogram, min_count: int = 5,
                       npoints: int = 40, span: float = 1e4) -> tuple[float, float]:
    """Scale ``s`` that best collapses ``other`` onto ``ref`` (ref at s=1).

    Coarse log-grid scan followed by a bounded refinement. Returns
    ``(s, collapse_error)``.
    """
    def err(log_s):
        try:
            return collapse_error([ref, other], [1.0, float(np.exp(log_s))], min_count, npoints)
        except ValueError:
            return np.inf

    grid = np.linspace(-np.log(span), np.log(span), 161)
    vals = np.array([err(g) for g in grid])
    k = int(np.argmin(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(err, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-4})
    best = res.x if res.fun <= vals[k] else grid[k]
    return float(np.exp(best)), float(min(res.fun, vals[k]))


def collapse_noise_floor(samples: Sequence[np.ndarray], n_boot: int = 20, seed: int = 0,
                         min_count: int = 5, npoints: int = 40, **hist_kw) -> float:
    """Collapse error explained by sampling noise alone.

    For every sample set, two independent bootstrap resamples are
    histogrammed on the set's own bins and compared with ``s = 1``; the
    floor is the largest per-set mean over ``n_boot`` repetitions.
    """
    rng = np.random.default_rng(seed)
    floors = []
    for values in samples:
        values = np.asarray(values)
        base = Histogram.from_samples(values, **hist_kw)
        errs = []
        for _ in range(n_boot):
            a = Histogram.from_samples(rng.choice(values, len(values)), edges=base.edges,
                                       binning=base.binning, discrete=base.discrete)
            b = Histogram.from_samples(rng.choice(values, len(values)), edges=base.edges,
                                       binning=base.binning, discrete=base.discrete)
            errs.append(collapse_error([a, b], None, min_count, npoints))
        floors.append(float(np.mean(errs)))
    return max(floors)
