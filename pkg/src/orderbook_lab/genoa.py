"""Reduced Genoa market: free Stigler dynamics with volatility feedback.

The deposition window tracks an exponentially weighted volatility ``v``::

    v  <- (1 - lam) * v + lam * |r|          (every step, zeros included)
    d  =  max(1, ceil(g * v))
    s  =  floor(d / b)

Above a critical feedback ``g_c`` the volatility runs away; the run is then
clamped at ``v_cap`` and flagged as diverged. This module also carries the
phase-transition tools: the g sweep with two estimates of ``g_c``, the
warm-started hysteresis loop, and the ``g_c(b)`` phase diagram.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import Book, PricePath, RngStream
from .errors import ConfigError
from .stigler import StiglerState, windowed_step


@dataclass(frozen=True)
class GenoaConfig:
    N: int
    b: float
    g: float = 0.0
    lam: float = 1e-3
    v_cap: float = 1e8
    v0: float = 1.0
    steps: int = 0
    burn_in: Optional[int] = None

    def __post_init__(self):
        if self.N < 1:
            raise ConfigError("N (order lifetime) must be >= 1")
        if not self.b > 2:
            raise ConfigError("b must exceed 2: trades impossible otherwise")
        if self.g < 0:
            raise ConfigError("g must be non-negative")
        if not 0 < self.lam < 1:
            raise ConfigError("lam must lie in (0, 1)")
        if not self.v_cap > 0 or self.v0 < 0:
            raise ConfigError("v_cap must be positive and v0 non-negative")
        if self.steps < 0 or (self.burn_in is not None and self.burn_in < 0):
            raise ConfigError("steps and burn_in must be non-negative")

    @property
    def effective_burn_in(self) -> int:
        # ~10 EMA memory times, and at least 10 order lifetimes
        if self.burn_in is not None:
            return self.burn_in
        return max(10 * self.N, int(10 / self.lam))


@dataclass
class GenoaState(StiglerState):
    v: float = 1.0
    diverged: bool = False


def genoa_init(config: GenoaConfig) -> GenoaState:
    return GenoaState(book=Book(), x=0, t=0, v=config.v0)


def genoa_update_volatility(v: float, r: int, lam: float,
                            v_cap: float = math.inf) -> float:
    v = (1.0 - lam) * v + lam * abs(r)
    return v_cap if v >= v_cap else v


def genoa_window(v: float, g: float, b: float) -> tuple[int, int]:
    d = max(1, math.ceil(g * v))
    return d, math.floor(d / b)


def genoa_step(state: GenoaState, config: GenoaConfig,
               rng: RngStream) -> tuple[GenoaState, Optional[int]]:
    d, s = genoa_window(state.v, config.g, config.b)
    x_before = state.x
    trade = windowed_step(state, config.N, s, d, rng)
    state.v = genoa_update_volatility(state.v, state.x - x_before, config.lam)
    if state.v >= config.v_cap:
        state.v = config.v_cap
        state.diverged = True
    return state, trade


def genoa_advance(state: GenoaState, config: GenoaConfig, nsteps: int,
                  rng: RngStream, record_v: bool = True):
    """Advance on the active backend; returns (prices, trade indices, v or None)."""
    from ._backend import kernels

    return kernels().advance_genoa(state, config, int(nsteps), rng, record_v)


def genoa_run(config: GenoaConfig, rng: RngStream,
              state: Optional[GenoaState] = None, burn_in: bool = True) -> PricePath:
    """Run and return the path; ``path.aux['v']`` holds the volatility series."""
    if state is None:
        state = genoa_init(config)
    if burn_in:
        genoa_advance(state, config, config.effective_burn_in, rng, record_v=False)
    t0, x0 = state.t, state.x
    prices, trades, v = genoa_advance(state, config, config.steps, rng)
    meta = {"model": "genoa", "N": config.N, "b": config.b, "g": config.g,
            "lam": config.lam, "v_cap": config.v_cap, "seed": rng.seed,
            "diverged": bool(state.diverged)}
    path = PricePath.from_dense(x0, prices, trades, t0=t0, meta=meta)
    path.aux["v"] = v
    return path


@dataclass
class SweepPoint:
    g: float
    mean_v: float
    alpha: float
    alpha_xmin: float
    n_tail: int
    diverged: bool


@dataclass
class SweepResult:
    points: list[SweepPoint]
    gc_divergence: Optional[float]
    gc_extrapolated: Optional[float]
    fit: dict = field(default_factory=dict)


def _tail_alpha(path: PricePath, quantile: float) -> tuple[float, float, int]:
    from .stats.fits import hill_alpha

    r = np.abs(path.returns())
    r = r[r > 0]
    if len(r) < 20:
        return math.nan, math.nan, 0
    xmin = float(np.quantile(r, quantile))
    try:
        alpha, n_tail = hill_alpha(r, xmin, discrete=False)
    except ValueError:  # every tail sample sits at xmin
        return math.nan, xmin, int(np.sum(r >= xmin))
    return alpha, xmin, n_tail


def extrapolate_gc(g: Sequence[float], alpha: Sequence[float]) -> tuple[Optional[float], dict]:
    """Root of the straight line through (g, alpha - 1)."""
    g = np.asarray(g, dtype=float)
    a = np.asarray(alpha, dtype=float) - 1.0
    ok = np.isfinite(a)
    if ok.sum() < 2:
        return None, {}
    slope, intercept = np.polyfit(g[ok], a[ok], 1)
    if slope >= 0:
        return None, {"slope": float(slope), "intercept": float(intercept)}
    return float(-intercept / slope), {"slope": float(slope), "intercept": float(intercept)}


def genoa_sweep_gc(config: GenoaConfig, g_grid: Sequence[float], rng: RngStream,
                   quantile: float = 0.95, fit_points: Optional[int] = None) -> SweepResult:
    """Run independent replicas over ascending ``g`` and locate ``g_c``.

    Replica ``i`` uses seed ``rng.seed + i``. ``fit_points`` limits the
    (alpha - 1) extrapolation to the last few non-diverged g values.
    """
    g_grid = list(g_grid)
    if any(b <= a for a, b in zip(g_grid, g_grid[1:])):
        raise ValueError("g_grid must be strictly ascending")
    points = []
    for i, g in enumerate(g_grid):
        path = genoa_run(replace(config, g=float(g)), rng.spawn(i))
        alpha, xmin, n_tail = _tail_alpha(path, quantile)
        points.append(SweepPoint(g=float(g), mean_v=float(np.mean(path.aux["v"])),
                                 alpha=alpha, alpha_xmin=xmin, n_tail=n_tail,
                                 diverged=bool(path.meta["diverged"])))
    div = [p.g for p in points if p.diverged]
    finite = [p for p in points if not p.diverged]
    if fit_points:
        finite = finite[-fit_points:]
    gc_ext, fit = extrapolate_gc([p.g for p in finite], [p.alpha for p in finite])
    return SweepResult(points=points, gc_divergence=min(div) if div else None,
                       gc_extrapolated=gc_ext, fit=fit)


@dataclass
class HysteresisResult:
    g_up: list[float]
    v_up: list[float]
    g_down: list[float]
    v_down: list[float]

    def separation(self) -> dict[float, float]:
        """|<v>_up - <v>_down| in decades at every g visited on both branches."""
        up = dict(zip(self.g_up, self.v_up))
        down = dict(zip(self.g_down, self.v_down))
        return {g: abs(math.log10(up[g]) - math.log10(down[g]))
                for g in sorted(set(up) & set(down))}


def genoa_hysteresis(config: GenoaConfig, g_grid: Sequence[float],
                     rng: RngStream) -> HysteresisResult:
    """Sweep ``g`` along the grid (up, then down), warm-starting every run.

    Each point runs ``config.burn_in`` unmeasured steps and then averages
    ``v`` over ``config.steps`` steps, starting from the final state of the
    previous point. Points where g rises are the up branch, the rest down.
    """
    g_grid = [float(g) for g in g_grid]
    state = genoa_init(config)
    result = HysteresisResult([], [], [], [])
    prev = -math.inf
    for g in g_grid:
        cfg = replace(config, g=g)
        state.diverged = False
        genoa_advance(state, cfg, cfg.effective_burn_in, rng, record_v=False)
        _, _, v = genoa_advance(state, cfg, cfg.steps, rng)
        mean_v = float(np.mean(v))
        if g >= prev and not result.g_down:
            result.g_up.append(g)
            result.v_up.append(mean_v)
        else:
            result.g_down.append(g)
            result.v_down.append(mean_v)
        prev = g
    return result


def genoa_critical_g(config: GenoaConfig, rng: RngStream, g_lo: float, g_hi: float,
                     tol: float = 0.25) -> float:
    """Bisect for the smallest g whose run hits ``v_cap`` within ``config.steps``."""
    def diverges(g: float, k: int) -> bool:
        path_state = genoa_init(config)
        cfg = replace(config, g=g)
        genoa_advance(path_state, cfg, cfg.steps, rng.spawn(k), record_v=False)
        return path_state.diverged

    k = 0
    if not diverges(g_hi, k):
        raise ValueError(f"no divergence at g={g_hi}; raise g_hi")
    while g_hi - g_lo > tol:
        k += 1
        mid = 0.5 * (g_lo + g_hi)
        if diverges(mid, k):
            g_hi = mid
        else:
            g_lo = mid
    return 0.5 * (g_lo + g_hi)


def genoa_phase_diagram(config: GenoaConfig, b_grid: Sequence[float], rng: RngStream,
                        g_lo: float, g_hi: float, tol: float = 0.25) -> list[tuple[float, float]]:
    """``(b, 1/g_c)`` for each b, with g_c from divergence bisection."""
    rows = []
    for i, b in enumerate(b_grid):
        cfg = replace(config, b=float(b))
        gc = genoa_critical_g(cfg, rng.spawn(1000 * i), g_lo, g_hi, tol)
        rows.append((float(b), 1.0 / gc))
    return rows
