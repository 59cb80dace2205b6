"""Run an experiment: simulate replicas, apply estimators, write artifacts."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .. import __version__
from ..bps import bps_run
from ..core import PricePath, RngStream
from ..genoa import genoa_hysteresis, genoa_phase_diagram, genoa_run, genoa_sweep_gc
from ..maslov import maslov_run
from ..stats import (Histogram, StatSeries, abs_return_autocorrelation, fit_collapse_scale,
                     hurst_normalized, hurst_simplified, interevent_statistics, lagged_abs_returns,
                     log_lags, mean_volatility, return_autocorrelation, return_distribution)
from ..stats.series import _jsonable
from ..stigler import stigler_run
from ..udm import udm_run
from .config import ExperimentConfig, Measurement, RunSpec, apply_scale
from .io import sha256, write_events, write_path, write_trades

RUNNERS = {"bps": bps_run, "stigler": stigler_run, "genoa": genoa_run,
           "maslov": maslov_run, "udm": udm_run}


class ExperimentError(RuntimeError):
    pass


@dataclass
class RunManifest:
    name: str
    config: dict
    seeds: list
    scale: int
    version: str
    wall_clock: float = 0.0
    files: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    def write(self, out: Path) -> Path:
        dest = out / "manifest.json"
        dest.write_text(json.dumps(_jsonable(asdict(self)), indent=2, sort_keys=True) + "\n")
        return dest

    def digests(self) -> dict[str, str]:
        return {f["path"]: f["sha256"] for f in self.files}

    def verify(self, out: Path) -> bool:
        return all(sha256(Path(out) / p) == d for p, d in self.digests().items())


def resolve_lags(spec, limit: Optional[int] = None) -> tuple[np.ndarray, list[int]]:
    """Lag list from a list or ``{lo, hi, per_decade}``; lags above ``limit``
    are split off and returned separately."""
    if spec is None:
        spec = {"lo": 1, "hi": 1000}
    if isinstance(spec, dict):
        lags = log_lags(int(spec.get("lo", 1)), int(float(spec["hi"])),
                        int(spec.get("per_decade", 10)))
    else:
        lags = np.unique(np.asarray([int(float(v)) for v in spec], dtype=np.int64))
    if limit is None:
        return lags, []
    return lags[lags <= limit], [int(k) for k in lags[lags > limit]]


def _series_meta(path: PricePath, run: Optional[RunSpec]) -> dict:
    meta = dict(path.meta)
    if run is not None:
        meta["label"] = run.label
        meta["model"] = run.model
        meta["params"] = {k: v for k, v in asdict(run.config).items()}
    meta["window"] = [int(path.t0), int(path.t0 + (len(path.x) - 1) * path.dt * path.steps_per_unit)]
    return meta


def measure(path: PricePath, m: Measurement, run: Optional[RunSpec] = None
            ) -> tuple[list[StatSeries], list[dict]]:
    """Apply one estimator request; returns (series, skipped-notes)."""
    p = m.params
    meta = _series_meta(path, run)
    skipped = []
    out: list[StatSeries] = []
    est = m.estimator
    n_ret = len(path.x) - 1

    def note(reason, **extra):
        skipped.append({"estimator": est, "label": meta.get("label"), "reason": reason, **extra})

    if est == "return_distribution":
        mode = p.get("mode", "step")
        n = n_ret if mode == "step" else path.n_trades - 1
        lags, dropped = resolve_lags(p.get("lags", [1]), n - 1)
        if dropped:
            note("lags exceed the window", lags=dropped)
        hists = return_distribution(path, lags, mode=mode, binning=p.get("binning", "log"),
                                    ratio=float(p.get("ratio", 1.25)), width=p.get("width"))
        for lag, h in hists.items():
            s = h.to_series(f"return_distribution_{mode}_lag{lag}")
            s.meta.update(meta, estimator=est)
            out.append(s)
    elif est in ("abs_return_autocorrelation", "return_autocorrelation"):
        lags, dropped = resolve_lags(p.get("lags"), n_ret // 10)
        if dropped:
            note("window shorter than 10x lag", lags=dropped)
        if len(lags):
            fn = abs_return_autocorrelation if est.startswith("abs") else return_autocorrelation
            s = fn(path, lags)
            s.meta.update(meta)
            out.append(s)
    elif est in ("hurst_simplified", "hurst_normalized"):
        lags, dropped = resolve_lags(p.get("lags"), n_ret)
        if dropped:
            note("lags exceed the window", lags=dropped)
        fn = hurst_simplified if est == "hurst_simplified" else hurst_normalized
        try:
            s = fn(path, lags, overlap=bool(p.get("overlap", False)))
            s.meta.update(meta)
            out.append(s)
        except ValueError as exc:
            note(str(exc))
    elif est == "interevent":
        try:
            cdf, cond = interevent_statistics(path, ratio=float(p.get("ratio", 1.25)),
                                              pairing=p.get("pairing", "ending"))
            for s in (cdf, cond):
                s.meta.update(meta)
                out.append(s)
        except ValueError as exc:
            note(str(exc))
    elif est == "mean_volatility":
        if "v" not in path.aux:
            note("no volatility series for this model")
        else:
            v = path.aux["v"]
            out.append(StatSeries("mean_volatility", [meta.get("g", 0.0)], [mean_volatility(v)],
                                  [len(v)], dict(meta, estimator=est)))
    elif est == "collapse_scales":
        lags, dropped = resolve_lags(p.get("lags", [1]), n_ret - 1)
        if dropped:
            note("lags exceed the window", lags=dropped)
        hists = [Histogram.from_samples(lagged_abs_returns(path, int(k))) for k in lags]
        scales, errs, keep, totals = [], [], [], []
        for k, h in zip(lags, hists):
            try:
                s, e = fit_collapse_scale(hists[0], h)
            except ValueError as exc:
                note(str(exc), lag=int(k))
                continue
            keep.append(int(k))
            totals.append(h.total)
            scales.append(s)
            errs.append(e)
        if keep:
            out.append(StatSeries("collapse_scales", keep, scales, totals,
                                  dict(meta, estimator=est, collapse_error=errs)))
    else:
        raise ValueError(f"unknown estimator {est!r}")
    return out, skipped


def simulate(run: RunSpec, seed: int, log: Optional[list] = None) -> PricePath:
    rng = RngStream(seed)
    if log is not None and run.model in ("maslov", "udm"):
        return RUNNERS[run.model](run.config, rng, log=log)
    return RUNNERS[run.model](run.config, rng)


def _task(args):
    """One (run, replica): simulate, measure, write requested raw outputs."""
    run, seed, measurements, save, out = args
    log = [] if "events" in save and run.model in ("maslov", "udm") else None
    try:
        path = simulate(run, seed, log)
    except Exception as exc:  # noqa: BLE001 - rewrapped with context
        raise ExperimentError(f"run {run.label!r} (seed {seed}) failed: {exc}") from exc
    series, skipped = [], []
    for m in measurements:
        try:
            s, sk = measure(path, m, run)
        except Exception as exc:  # noqa: BLE001
            raise ExperimentError(f"run {run.label!r} (seed {seed}), estimator "
                                  f"{m.estimator}: {exc}") from exc
        series.extend(s)
        skipped.extend(dict(n, seed=seed) for n in sk)
    files = []
    base = Path(out) / run.label / f"seed{seed}"
    if "path" in save:
        files.append(write_path(path, base / "path.csv"))
    if "trades" in save:
        files.append(write_trades(path, base / "trades.csv"))
    if log is not None:
        files.append(write_events(log, base / "events.csv"))
    return series, skipped, [str(f) for f in files]


def merge_replicas(groups: list[list[StatSeries]]) -> list[StatSeries]:
    """Average each named series across replicas on their common x values.

    Per-point standard errors go into ``meta['stderr']``; counts are summed.
    """
    if len(groups) == 1:
        return groups[0]
    merged = []
    names = [s.name for s in groups[0]]
    for name in names:
        parts = [next(s for s in g if s.name == name) for g in groups
                 if any(s.name == name for s in g)]
        common = parts[0].x
        for s in parts[1:]:
            common = np.intersect1d(common, s.x)
        ys = np.array([s.y[np.searchsorted(s.x, common)] for s in parts])
        cs = np.array([s.count[np.searchsorted(s.x, common)] for s in parts])
        stderr = ys.std(axis=0, ddof=1) / np.sqrt(len(parts))
        meta = dict(parts[0].meta, replicas=len(parts), stderr=stderr,
                    seeds=[s.meta.get("seed") for s in parts])
        meta.pop("seed", None)
        merged.append(StatSeries(name, common, ys.mean(axis=0), cs.sum(axis=0), meta))
    return merged


def _protocol_series(config: ExperimentConfig) -> list[StatSeries]:
    proto = config.protocol
    cfg, opt = proto.config, proto.options
    rng = RngStream(config.seed)
    base = {"model": "genoa", "protocol": proto.kind, "seed": config.seed,
            "params": asdict(cfg)}
    if proto.kind == "genoa_sweep":
        res = genoa_sweep_gc(cfg, opt["g_grid"], rng, quantile=float(opt.get("quantile", 0.95)),
                             fit_points=opt.get("fit_points"))
        g = [p.g for p in res.points]
        gc = {"gc_divergence": res.gc_divergence, "gc_extrapolated": res.gc_extrapolated,
              "fit": res.fit, "diverged": [p.diverged for p in res.points]}
        return [
            StatSeries("genoa_alpha", g, [p.alpha for p in res.points],
                       [p.n_tail for p in res.points],
                       dict(base, **gc, xmin=[p.alpha_xmin for p in res.points])),
            StatSeries("genoa_mean_volatility", g, [p.mean_v for p in res.points],
                       [cfg.steps] * len(g), dict(base, **gc)),
        ]
    if proto.kind == "genoa_hysteresis":
        res = genoa_hysteresis(cfg, opt["g_grid"], rng)
        out = []
        for branch, gs, vs in (("up", res.g_up, res.v_up), ("down", res.g_down, res.v_down)):
            order = np.argsort(gs)
            out.append(StatSeries(f"genoa_hysteresis_{branch}", np.asarray(gs)[order],
                                  np.asarray(vs)[order], [cfg.steps] * len(gs),
                                  dict(base, branch=branch, sweep_order=list(gs),
                                       separation_decades=res.separation())))
        return out
    if proto.kind == "genoa_phase_diagram":
        rows = genoa_phase_diagram(cfg, opt["b_grid"], rng, float(opt.get("g_lo", 5)),
                                   float(opt.get("g_hi", 400)), float(opt.get("tol", 0.25)))
        return [StatSeries("genoa_phase_diagram", [b for b, _ in rows], [ig for _, ig in rows],
                           [1] * len(rows), dict(base, y="1/g_c"))]
    raise ValueError(proto.kind)


def run_experiment(config: ExperimentConfig, out=None, scale: int = 1,
                   jobs: int = 1) -> RunManifest:
    """Simulate every run for every replica seed, merge, and write artifacts.

    Replica ``i`` of every run uses seed ``config.seed + i``. Merging is by
    replica index, so ``jobs`` never changes the output bytes.
    """
    start = time.perf_counter()
    config = apply_scale(config, scale)
    out = Path(out or config.output or Path("out") / config.name)
    out.mkdir(parents=True, exist_ok=True)
    seeds = config.seeds()
    tasks = [(run, seed, config.measurements, config.save, str(out))
             for run in config.runs for seed in seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]

    manifest = RunManifest(name=config.name, seeds=seeds,
                           config=dict(config.source, seed=config.seed, replicas=config.replicas),
                           scale=int(scale), version=__version__)
    written = []
    for r, run in enumerate(config.runs):
        chunk = results[r * len(seeds):(r + 1) * len(seeds)]
        for _, skipped, files in chunk:
            manifest.skipped.extend(skipped)
            written.extend(files)
        for s in merge_replicas([c[0] for c in chunk]):
            written.extend(str(f) for f in s.to_csv(out / run.label / f"{s.name}.csv"))
    if config.protocol is not None:
        for s in _protocol_series(config):
            written.extend(str(f) for f in s.to_csv(out / "protocol" / f"{s.name}.csv"))

    for f in sorted(written):
        rel = Path(f).resolve().relative_to(out.resolve())
        manifest.files.append({"path": str(rel), "sha256": sha256(f)})
    manifest.wall_clock = time.perf_counter() - start
    manifest.write(out)
    return manifest
