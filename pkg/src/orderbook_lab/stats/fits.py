"""Power-law slopes, tail indices and decay-law comparisons."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, optimize, stats

from .series import StatSeries


def _loglog(series_or_xy, x_range):
    if isinstance(series_or_xy, StatSeries):
        x, y = series_or_xy.x, series_or_xy.y
    else:
        x, y = (np.asarray(a, dtype=float) for a in series_or_xy)
    keep = (x > 0) & (y > 0) & np.isfinite(y)
    if x_range is not None:
        lo, hi = x_range
        keep &= (x >= lo) & (x <= hi)
    return np.log(x[keep]), np.log(y[keep])


def powerlaw_slope(series, x_range: Optional[tuple[float, float]] = None,
                   n_boot: int = 200, seed: int = 0) -> tuple[float, float]:
    """Least-squares slope of ``ln y`` against ``ln x`` on ``x_range``.

    The standard error comes from a pairs bootstrap with a fixed seed, so the
    result is a deterministic function of the input.
    """
    lx, ly = _loglog(series, x_range)
    if len(lx) < 5:
        raise ValueError(f"insufficient points: {len(lx)} with positive y in range (need 5)")
    slope = float(np.polyfit(lx, ly, 1)[0])
    rng = np.random.default_rng(seed)
    boot = []
    for _ in range(n_boot):
        idx = rng.integers(0, len(lx), len(lx))
        if np.ptp(lx[idx]) == 0:
            continue
        boot.append(np.polyfit(lx[idx], ly[idx], 1)[0])
    err = float(np.std(boot, ddof=1)) if len(boot) > 1 else 0.0
    return slope, err


def hill_alpha(samples, xmin: float, discrete: bool = True) -> tuple[float, int]:
    """Maximum-likelihood tail index for ``P(>x) ~ x^-alpha``, ``x >= xmin``.

    For integer data the lower cutoff is shifted to ``xmin - 1/2``, the usual
    continuous approximation of the discrete power law.
    """
    x = np.asarray(samples, dtype=float)
    tail = x[x >= xmin]
    n = len(tail)
    if n < 2:
        raise ValueError("fewer than two samples in the tail")
    x0 = xmin - 0.5 if discrete else xmin
    if x0 <= 0:
        raise ValueError("xmin too small for the tail fit")
    s = np.log(tail / x0).sum()
    if s <= 0:
        raise ValueError("degenerate tail")
    return float(n / s), n


@dataclass
class CutoffTest:
    """Power law against power law times exponential cutoff on ``x >= xmin``.

    ``ratio`` is ``2 (lnL_cutoff - lnL_power) >= 0``; since the models are
    nested on the boundary ``lambda = 0`` the p-value is half the chi-square
    tail with one degree of freedom. A small p rejects the pure power law.
    """

    alpha_power: float
    alpha_cutoff: float
    lam: float
    ratio: float
    p_value: float
    n_tail: int

    def rejects_power_law(self, level: float = 0.01) -> bool:
        return self.p_value < level


def _cutoff_loglik(params, x, xmin):
    a, lam = params
    if lam < 0:
        return -np.inf
    norm, _ = integrate.quad(lambda u: u ** -a * np.exp(-lam * u), xmin, np.inf,
                             limit=200)
    if not np.isfinite(norm) or norm <= 0:
        return -np.inf
    return float(-a * np.log(x).sum() - lam * x.sum() - len(x) * np.log(norm))


def powerlaw_cutoff_test(samples, xmin: float, discrete: bool = True) -> CutoffTest:
    """Likelihood-ratio test for a cutoff on the continuous-approximation tail."""
    x = np.asarray(samples, dtype=float)
    x = x[x >= xmin]
    x0 = xmin - 0.5 if discrete else xmin
    n = len(x)
    if n < 10:
        raise ValueError("fewer than ten samples in the tail")
    # pure power law on [x0, inf), density exponent a = 1 + alpha
    alpha = n / np.log(x / x0).sum()
    a_pl = 1 + alpha
    ll_pl = n * np.log((a_pl - 1) / x0) - a_pl * np.log(x / x0).sum()

    def neg(p):
        v = _cutoff_loglik(p, x, x0)
        return np.inf if not np.isfinite(v) else -v

    best = None
    scale = 1.0 / x.mean()
    for a_start in (a_pl, 1.0, 0.5 * a_pl + 0.5):
        for lam_start in (0.1 * scale, scale):
            res = optimize.minimize(neg, [a_start, lam_start], method="Nelder-Mead",
                                    options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 4000})
            if best is None or res.fun < best.fun:
                best = res
    a_c, lam = best.x
    ll_c = -best.fun
    if ll_c < ll_pl:  # the power law is the lam -> 0 member
        a_c, lam, ll_c = a_pl, 0.0, ll_pl
    ratio = max(0.0, 2 * (ll_c - ll_pl))
    p = 0.5 * stats.chi2.sf(ratio, 1) if ratio > 0 else 1.0
    return CutoffTest(float(alpha), float(a_c - 1), float(lam), float(ratio), float(p), n)


@dataclass
class DecayFit:
    law: str
    params: dict
    rss: float
    n: int


def _fit_ln(f, lx, x, ly, p0):
    def resid(p):
        return f(x, lx, *p) - ly

    res = optimize.least_squares(resid, p0, method="lm", max_nfev=20000)
    return res.x, float(np.sum(res.fun ** 2))


def fit_decay_laws(series, x_range: Optional[tuple[float, float]] = None) -> dict[str, DecayFit]:
    """Fit power, exponential and stretched-exponential decays to positive ``y``.

    All three are fitted in ``ln y`` so their residual sums are comparable:

    * power: ``ln y = c - a ln x``
    * exponential: ``ln y = c - x / tau``
    * stretched: ``ln y = c - (x / tau)^beta``
    """
    lx, ly = _loglog(series, x_range)
    if len(lx) < 5:
        raise ValueError("insufficient points")
    x = np.exp(lx)
    out = {}
    a, c = np.polyfit(lx, ly, 1)
    rss = float(np.sum((c + a * lx - ly) ** 2))
    out["power"] = DecayFit("power", {"c": float(c), "a": float(-a)}, rss, len(x))

    s, c = np.polyfit(x, ly, 1)
    tau0 = -1 / s if s < 0 else x.max()
    p, rss = _fit_ln(lambda x, lx, c, lt: c - x / np.exp(lt), lx, x, ly, [c, np.log(tau0)])
    out["exponential"] = DecayFit("exponential", {"c": float(p[0]), "tau": float(np.exp(p[1]))},
                                  rss, len(x))

    def stretched(x, lx, c, lt, lb):
        with np.errstate(over="ignore"):
            return c - np.exp(np.minimum(np.exp(lb) * (lx - lt), 700.0))

    best = None
    for beta0 in (0.2, 0.5, 1.0):
        for tau0_ in (x.min(), np.sqrt(x.min() * x.max()), x.max()):
            try:
                p, rss = _fit_ln(stretched, lx, x, ly, [ly.max(), np.log(tau0_), np.log(beta0)])
            except (ValueError, RuntimeError):
                continue
            if best is None or rss < best[1]:
                best = (p, rss)
    p, rss = best
    out["stretched"] = DecayFit("stretched", {"c": float(p[0]), "tau": float(np.exp(p[1])),
                                              "beta": float(np.exp(p[2]))}, rss, len(x))
    return out


def best_decay_law(series, x_range=None) -> str:
    fits = fit_decay_laws(series, x_range)
    return min(fits.values(), key=lambda f: f.rss).law
