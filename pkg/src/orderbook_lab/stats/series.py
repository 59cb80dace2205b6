"""StatSeries: the (x, y, count) table every estimator returns."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

FORMAT_VERSION = 1


@dataclass
class StatSeries:
    name: str
    x: np.ndarray
    y: np.ndarray
    count: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.count = np.asarray(self.count, dtype=np.int64)
        if not (len(self.x) == len(self.y) == len(self.count)):
            raise ValueError("x, y and count must have equal length")
        if len(self.x) > 1 and np.any(np.diff(self.x) <= 0):
            raise ValueError("x must be strictly ascending")

    def __len__(self) -> int:
        return len(self.x)

    def select(self, lo: Optional[float] = None, hi: Optional[float] = None) -> "StatSeries":
        keep = np.ones(len(self.x), dtype=bool)
        if lo is not None:
            keep &= self.x >= lo
        if hi is not None:
            keep &= self.x <= hi
        return StatSeries(self.name, self.x[keep], self.y[keep], self.count[keep], dict(self.meta))

    def to_csv(self, path) -> tuple[Path, Path]:
        """Write ``path`` (x,y,count) and the ``path + '.json'`` metadata sidecar.

        Floats are written with ``repr`` so files are byte-stable for equal data.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "y", "count"])
            for x, y, c in zip(self.x, self.y, self.count):
                w.writerow([repr(float(x)), repr(float(y)), int(c)])
        side = path.with_name(path.name + ".json")
        meta = {"name": self.name, "version": FORMAT_VERSION, **_jsonable(self.meta)}
        side.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        return path, side

    @classmethod
    def from_csv(cls, path) -> "StatSeries":
        path = Path(path)
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        side = path.with_name(path.name + ".json")
        meta = json.loads(side.read_text()) if side.exists() else {}
        name = meta.pop("name", path.stem)
        meta.pop("version", None)
        if data.size == 0:
            return cls(name, [], [], [], meta)
        return cls(name, data[:, 0], data[:, 1], data[:, 2].astype(np.int64), meta)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def log_lags(lo: int, hi: int, per_decade: int = 10) -> np.ndarray:
    """Distinct integers roughly log-spaced on ``[lo, hi]``."""
    if lo < 1 or hi < lo:
        raise ValueError("need 1 <= lo <= hi")
    n = max(2, int(np.ceil(np.log10(hi / lo) * per_decade)) + 1)
    return np.unique(np.round(np.geomspace(lo, hi, n)).astype(np.int64))


def mean_volatility(v, window: Optional[tuple[int, int]] = None) -> float:
    """Arithmetic mean of ``v`` over ``[start, stop)`` (whole series by default)."""
    v = np.asarray(v, dtype=float)
    if window is not None:
        start, stop = window
        if start < 0 or stop > len(v):
            raise ValueError("window outside the series")
        v = v[start:stop]
    if len(v) == 0:
        raise ValueError("empty window")
    return float(v.mean())
