"""Embedded experiment configs, one per reproducible figure.

Model parameters follow the figure captions. Run lengths are sized so each
preset finishes in minutes on one core at ``--scale 1``; the large BPS Hurst
case is tagged ``slow``.
"""

from __future__ import annotations

from .config import ExperimentConfig, config_from_dict

SEED = 20080101

LAGS_1_1E5 = [1, 10, 100, 1000, 10000, 100000]
LAGS_1_1E4 = [1, 10, 100, 1000, 10000]


def _lags(lo, hi, per_decade=8):
    return {"lo": lo, "hi": hi, "per_decade": per_decade}


def _run(label, model, **params):
    return {"label": label, "model": model, "params": params}


def _preset(name, description, runs, measurements=(), save=(), protocol=None, tags=()):
    doc = {"name": name, "description": description, "seed": SEED, "replicas": 1,
           "runs": list(runs), "measurements": list(measurements)}
    if save:
        doc["save"] = list(save)
    if protocol:
        doc["protocol"] = protocol
    if tags:
        doc["tags"] = list(tags)
    return doc


STIGLER_BOUNDED = _run("bounded-L5000-N5000", "stigler", variant="bounded", L=5000, N=5000,
                       steps=100_000_000)
STIGLER_FREE = _run("free-N5000-s4000-d10000", "stigler", variant="free", N=5000, s=4000,
                    d=10_000, steps=100_000_000)


def _maslov(q, nbar=1000, steps=100_000_000):
    return _run(f"q{q:g}-nbar{nbar}", "maslov", q=q, nbar=nbar, steps=steps)


def _udm(L, q, nbar, steps=20_000_000):
    return _run(f"L{L}-q{q:g}-nbar{nbar}", "udm", L=L, q=q, nbar=nbar, steps=steps)


_DOCS = [
    _preset("fig1-bps-evolution", "BPS particle and price trajectory, L=20, N=5",
            [_run("L20-N5", "bps", L=20, N=5, steps=400_000, burn_in=0)],
            save=["path", "trades"]),
    _preset("fig2-bps-interevent", "BPS waiting-time distribution and conditional return",
            [_run("L500-N200", "bps", L=500, N=200, steps=1_500_000_000)],
            [{"estimator": "interevent", "ratio": 1.25}]),
    _preset("fig3-bps-returns", "BPS one-transaction returns for three (L, N)",
            [_run("L250-N50", "bps", L=250, N=50, steps=1_000_000_000),
             _run("L500-N200", "bps", L=500, N=200, steps=2_500_000_000),
             _run("L250-N250", "bps", L=250, N=250, steps=1_000_000_000)],
            [{"estimator": "return_distribution", "lags": [1], "mode": "trade"}]),
    _preset("fig4-bps-hurst", "BPS Hurst plot, L=250, N=50",
            [_run("L250-N50", "bps", L=250, N=50, steps=2_000_000_000)],
            [{"estimator": "hurst_simplified", "lags": _lags(1, 1_000_000)}]),
    _preset("fig4-bps-hurst-large", "BPS Hurst plot, L=N=2e4",
            [_run("L20000-N20000", "bps", L=20_000, N=20_000, steps=4_000_000_000,
                  burn_in=4_000_000_000)],
            [{"estimator": "hurst_simplified", "lags": _lags(1, 10_000)}],
            tags=["slow"]),
    _preset("fig5-stigler-timeseries", "Bounded Stigler price and one-step returns",
            [_run("bounded-L5000-N5000", "stigler", variant="bounded", L=5000, N=5000,
                  steps=1_000_000)],
            save=["path"]),
    _preset("fig6-stigler-returns", "One-step returns, bounded and free Stigler",
            [STIGLER_BOUNDED, STIGLER_FREE],
            [{"estimator": "return_distribution", "lags": [1]}]),
    _preset("fig7-stigler-abs-autocorrelation", "Absolute-return autocorrelation, Stigler",
            [STIGLER_BOUNDED, STIGLER_FREE],
            [{"estimator": "abs_return_autocorrelation", "lags": _lags(1, 10_000)}]),
    _preset("fig8-stigler-autocorrelation", "Return autocorrelation, Stigler",
            [STIGLER_BOUNDED, STIGLER_FREE],
            [{"estimator": "return_autocorrelation", "lags": _lags(1, 10_000)}]),
    _preset("fig9-genoa-returns", "Genoa return distributions near g_c and alpha(g)",
            [_run(f"g{g:g}", "genoa", N=1000, b=7, g=g, steps=10_000_000)
             for g in (51, 52, 52.36)],
            [{"estimator": "return_distribution", "lags": [1]},
             {"estimator": "mean_volatility"}],
            protocol={"kind": "genoa_sweep", "params": {"N": 1000, "b": 7, "steps": 10_000_000},
                      "g_grid": [50, 50.5, 51, 51.5, 52, 52.36]}),
    _preset("fig10-genoa-volatility", "Genoa mean volatility against g with hysteresis",
            [],
            protocol={"kind": "genoa_hysteresis",
                      "params": {"N": 1000, "b": 7, "steps": 2_000_000, "burn_in": 1_000_000},
                      "g_grid": [50, 51, 51.5, 52, 52.2, 52.4, 52.6, 53, 54,
                                 53, 52.6, 52.4, 52.2, 52, 51.5, 51, 50]}),
    _preset("fig11-genoa-phasediagram", "Genoa phase diagram, 1/g_c against b",
            [],
            protocol={"kind": "genoa_phase_diagram",
                      "params": {"N": 1000, "b": 7, "steps": 5_000_000},
                      "b_grid": [3, 5, 7, 10], "g_lo": 5, "g_hi": 400, "tol": 0.5}),
    _preset("fig12-genoa-autocorrelation", "Genoa absolute-return autocorrelation, g=52",
            [_run("g52", "genoa", N=1000, b=7, g=52, steps=50_000_000)],
            [{"estimator": "abs_return_autocorrelation", "lags": _lags(1, 100_000)}]),
    _preset("fig13-hurst-comparison", "Hurst plots of bounded, free Stigler and Genoa",
            [STIGLER_BOUNDED, STIGLER_FREE,
             _run("genoa-g51.6", "genoa", N=1000, b=7, g=51.6, steps=100_000_000)],
            [{"estimator": "hurst_simplified", "lags": _lags(1, 1_000_000)}]),
    _preset("fig14-maslov-evolution", "Maslov order histories, nbar=100, q=0.05",
            [_run("q0.05-nbar100", "maslov", q=0.05, nbar=100, steps=100_000)],
            save=["path", "events"]),
    _preset("fig15-maslov-returns", "Maslov returns without evaporation at six lags",
            [_maslov(0.0)],
            [{"estimator": "return_distribution", "lags": LAGS_1_1E5}]),
    _preset("fig16-maslov-collapse", "Rescaled Maslov returns and the scale against lag",
            [_maslov(0.0)],
            [{"estimator": "return_distribution", "lags": LAGS_1_1E5},
             {"estimator": "collapse_scales", "lags": LAGS_1_1E5}]),
    _preset("fig17-maslov-autocorrelation", "Maslov absolute-return autocorrelation",
            [_maslov(0.0), _maslov(0.01)],
            [{"estimator": "abs_return_autocorrelation", "lags": _lags(1, 100_000)}]),
    _preset("fig18-maslov-evaporation-returns", "Maslov one-step returns for q=0, 0.01, 0.05",
            [_maslov(0.0), _maslov(0.01), _maslov(0.05)],
            [{"estimator": "return_distribution", "lags": [1]}]),
    _preset("fig19-maslov-evaporation-lags", "Maslov returns at six lags, q=0.05",
            [_maslov(0.05)],
            [{"estimator": "return_distribution", "lags": LAGS_1_1E5}]),
    _preset("fig20-maslov-hurst", "Maslov Hurst plots for q=0, 0.01, 0.05",
            [_maslov(0.0), _maslov(0.01), _maslov(0.05)],
            [{"estimator": "hurst_simplified", "lags": _lags(1, 1_000_000)}]),
    _preset("fig21-udm-evolution", "UDM order histories, L=1e4, nbar=100, q=0.9",
            [_run("L10000-q0.9-nbar100", "udm", L=10_000, q=0.9, nbar=100, steps=100_000)],
            save=["path", "events"]),
    _preset("fig22-udm-returns-nbar", "UDM one-step returns for three nbar",
            [_udm(1_000_000, 0.9, n) for n in (10_000, 1000, 100)],
            [{"estimator": "return_distribution", "lags": [1]}]),
    _preset("fig23-udm-returns-q", "UDM one-step returns for four q",
            [_udm(1_000_000, q, 10_000) for q in (0.5, 0.9, 0.95, 0.99)],
            [{"estimator": "return_distribution", "lags": [1]}]),
    _preset("fig24-udm-returns-lags", "UDM returns at five lags, q=0.5",
            [_udm(1_000_000, 0.5, 10_000)],
            [{"estimator": "return_distribution", "lags": LAGS_1_1E4}]),
    _preset("fig25-udm-autocorrelation", "UDM absolute-return autocorrelation",
            [_udm(100_000, 0.9, n) for n in (1000, 100)],
            [{"estimator": "abs_return_autocorrelation", "lags": _lags(1, 100_000)}]),
    _preset("fig26-udm-hurst", "UDM Hurst plots",
            [_udm(1_000_000, 0.9, 10_000), _udm(1_000_000, 0.9, 1000),
             _udm(1_000_000, 0.5, 10_000)],
            [{"estimator": "hurst_simplified", "lags": _lags(1, 1_000_000)}]),
]

PRESETS: dict[str, dict] = {d["name"]: d for d in _DOCS}


def list_presets() -> list[tuple[str, str, list[str]]]:
    """(name, description, tags) for every preset, in figure order."""
    return [(d["name"], d["description"], d.get("tags", [])) for d in _DOCS]


def preset_config(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise KeyError(name)
    return config_from_dict(PRESETS[name])
