"""Experiment configuration: YAML documents validated into model configs.

Schema (all keys except ``seed`` and ``runs`` optional)::

    name: fig2-bps-interevent
    seed: 20240101            # required, no implicit entropy
    replicas: 1               # replica i runs with seed + i
    output: out/fig2          # overridden by --out
    save: [trades]            # any of path, trades, events
    runs:
      - label: L500-N200
        model: bps            # bps | stigler | genoa | maslov | udm
        params: {L: 500, N: 200, steps: 1200000000}
    measurements:
      - estimator: interevent
        ratio: 1.25
    protocol:                 # optional Genoa phase-transition tools
      kind: genoa_sweep       # genoa_sweep | genoa_hysteresis | genoa_phase_diagram
      params: {N: 1000, b: 7, steps: 10000000}
      g_grid: [50, 51, 52]

Lags for estimators are either a list or ``{lo, hi, per_decade}``.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import yaml

from ..bps import BpsConfig
from ..errors import ConfigError
from ..genoa import GenoaConfig
from ..maslov import MaslovConfig
from ..stigler import StiglerConfig
from ..udm import UdmConfig

MODELS = {
    "bps": BpsConfig,
    "stigler": StiglerConfig,
    "genoa": GenoaConfig,
    "maslov": MaslovConfig,
    "udm": UdmConfig,
}

ESTIMATORS = (
    "return_distribution", "abs_return_autocorrelation", "return_autocorrelation",
    "hurst_simplified", "hurst_normalized", "interevent", "mean_volatility",
    "collapse_scales",
)
PROTOCOLS = ("genoa_sweep", "genoa_hysteresis", "genoa_phase_diagram")
SAVE_KINDS = ("path", "trades", "events")
INT_KEYS = {"L", "N", "s", "d", "steps", "burn_in", "sample_every", "lifetime"}


@dataclass(frozen=True)
class RunSpec:
    label: str
    model: str
    config: Any


@dataclass(frozen=True)
class Measurement:
    estimator: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Protocol:
    kind: str
    config: GenoaConfig
    options: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    seed: int
    runs: tuple
    measurements: tuple = ()
    replicas: int = 1
    output: Optional[str] = None
    save: tuple = ()
    protocol: Optional[Protocol] = None
    tags: tuple = ()
    source: dict = field(default_factory=dict, compare=False)

    def seeds(self) -> list[int]:
        return [self.seed + i for i in range(self.replicas)]


def _int(value, where: str) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return int(value)
    if isinstance(value, str):
        try:
            f = float(value)
        except ValueError:
            raise ConfigError(f"{where}: expected an integer, got {value!r}") from None
        return _int(f, where)
    if isinstance(value, int):
        return value
    raise ConfigError(f"{where}: expected an integer, got {value!r}")


def _number(value, where: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected a number, got {value!r}") from None


def build_model(model: str, params: dict, where: str):
    """Validate ``params`` into the model's config dataclass."""
    if model not in MODELS:
        raise ConfigError(f"{where}.model: unknown model {model!r} (one of {', '.join(MODELS)})")
    if not isinstance(params, dict):
        raise ConfigError(f"{where}.params: expected a mapping")
    cls = MODELS[model]
    known = set(cls.__dataclass_fields__)
    kwargs = {}
    for key, value in params.items():
        if key not in known:
            raise ConfigError(f"{where}.params.{key}: unknown parameter for {model}")
        if value is None or key in ("variant", "removal"):
            kwargs[key] = value
        elif key in INT_KEYS:
            kwargs[key] = _int(value, f"{where}.params.{key}")
        else:
            kwargs[key] = _number(value, f"{where}.params.{key}")
    try:
        return cls(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"{where}.params: {exc}") from None
    except TypeError as exc:
        raise ConfigError(f"{where}.params: {exc}") from None


def _parse(text: str) -> dict:
    try:
        doc = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"parse error at {where}: {exc.problem}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"parse error: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping at the top level")
    return doc


def config_from_dict(doc: dict) -> ExperimentConfig:
    doc = copy.deepcopy(doc)
    allowed = {"name", "seed", "replicas", "output", "save", "runs", "measurements",
               "protocol", "tags", "description"}
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"{key}: unknown top-level key")
    if doc.get("seed") is None:
        raise ConfigError("seed: missing; every experiment needs an explicit seed")
    seed = _int(doc["seed"], "seed")
    if not 0 <= seed < 2 ** 64:
        raise ConfigError("seed: must fit in 64 unsigned bits")
    replicas = _int(doc.get("replicas", 1), "replicas")
    if replicas < 1:
        raise ConfigError("replicas: must be >= 1")

    runs = []
    raw_runs = doc.get("runs") or []
    if not isinstance(raw_runs, list):
        raise ConfigError("runs: expected a list")
    for i, run in enumerate(raw_runs):
        where = f"runs[{i}]"
        if not isinstance(run, dict) or "model" not in run:
            raise ConfigError(f"{where}: needs a 'model' key")
        cfg = build_model(run["model"], run.get("params") or {}, where)
        runs.append(RunSpec(str(run.get("label", f"run{i}")), run["model"], cfg))
    labels = [r.label for r in runs]
    if len(set(labels)) != len(labels):
        raise ConfigError("runs: labels must be unique")

    measurements = []
    for i, m in enumerate(doc.get("measurements") or []):
        if not isinstance(m, dict) or "estimator" not in m:
            raise ConfigError(f"measurements[{i}]: needs an 'estimator' key")
        if m["estimator"] not in ESTIMATORS:
            raise ConfigError(f"measurements[{i}].estimator: unknown estimator "
                              f"{m['estimator']!r} (one of {', '.join(ESTIMATORS)})")
        params = {k: v for k, v in m.items() if k != "estimator"}
        measurements.append(Measurement(m["estimator"], params))

    protocol = None
    if doc.get("protocol") is not None:
        p = doc["protocol"]
        if not isinstance(p, dict) or p.get("kind") not in PROTOCOLS:
            raise ConfigError(f"protocol.kind: one of {', '.join(PROTOCOLS)}")
        cfg = build_model("genoa", p.get("params") or {}, "protocol")
        options = {k: v for k, v in p.items() if k not in ("kind", "params")}
        protocol = Protocol(p["kind"], cfg, options)

    if not runs and protocol is None:
        raise ConfigError("runs: at least one run (or a protocol) is required")

    save = tuple(doc.get("save") or ())
    for kind in save:
        if kind not in SAVE_KINDS:
            raise ConfigError(f"save: unknown output {kind!r} (one of {', '.join(SAVE_KINDS)})")

    return ExperimentConfig(
        name=str(doc.get("name", "experiment")), seed=seed, runs=tuple(runs),
        measurements=tuple(measurements), replicas=replicas,
        output=doc.get("output"), save=save, protocol=protocol,
        tags=tuple(doc.get("tags") or ()), source=doc)


def load_config(source) -> ExperimentConfig:
    """Load from a path, or from inline YAML text when ``source`` is not a file."""
    if isinstance(source, dict):
        return config_from_dict(source)
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and Path(source).is_file()):
        text = Path(source).read_text()
    else:
        text = str(source)
    return config_from_dict(_parse(text))


def _scaled(cfg, k: int):
    changes = {}
    if getattr(cfg, "steps", 0):
        changes["steps"] = max(1, cfg.steps // k)
    burn = getattr(cfg, "burn_in", None)
    changes["burn_in"] = (cfg.effective_burn_in if burn is None else burn) // k
    return replace(cfg, **changes)


def apply_scale(config: ExperimentConfig, k: int) -> ExperimentConfig:
    """Divide every run length and burn-in by ``k``; system sizes are kept."""
    k = int(k)
    if k < 1:
        raise ConfigError("scale: must be an integer >= 1")
    if k == 1:
        return config
    runs = tuple(replace(r, config=_scaled(r.config, k)) for r in config.runs)
    protocol = config.protocol
    if protocol is not None:
        protocol = replace(protocol, config=_scaled(protocol.config, k))
    return replace(config, runs=runs, protocol=protocol)
