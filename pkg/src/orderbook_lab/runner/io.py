"""CSV writers and readers for paths, trades and order-event logs."""

from __future__ import annotations

import csv
import hashlib
from pathlib import Path

import numpy as np

from ..core import PricePath


def _time(t: int, steps_per_unit: int):
    return int(t) if steps_per_unit == 1 else repr(t / steps_per_unit)


def write_path(path: PricePath, dest) -> Path:
    """Dense price series as ``t,x`` with ``t`` in model time units."""
    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    every = round(path.dt * path.steps_per_unit)
    with open(dest, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x"])
        for k, x in enumerate(path.x):
            w.writerow([_time(path.t0 + k * every, path.steps_per_unit), int(x)])
    return dest


def write_trades(path: PricePath, dest) -> Path:
    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    with open(dest, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "price", "return"])
        for t, p, r in zip(path.trade_t, path.trade_price, path.trade_return):
            w.writerow([_time(t, path.steps_per_unit), int(p), int(r)])
    return dest


def write_events(log: list, dest) -> Path:
    """Order history rows ``birth_t,death_t,tick,side,cause``; open orders
    have an empty ``death_t`` and side is ``bid`` or ``ask``."""
    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    with open(dest, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["birth_t", "death_t", "tick", "side", "cause"])
        for birth, death, tick, side, cause in log:
            w.writerow([birth, "" if death is None else death, tick,
                        "bid" if side == 0 else "ask", cause])
    return dest


def read_path(src) -> PricePath:
    """Read a ``t,x`` file back into a PricePath.

    Only the dense series is stored, so trades are reconstructed as the
    samples where the price moved; trades that left the price unchanged
    cannot be recovered.
    """
    src = Path(src)
    with open(src, newline="") as fh:
        header = next(csv.reader(fh))
    if [h.strip() for h in header[:2]] != ["t", "x"]:
        raise ValueError(f"{src}: expected header 't,x', got {','.join(header)!r}")
    data = np.loadtxt(src, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[0] < 2:
        raise ValueError(f"{src}: need at least two samples")
    t, x = data[:, 0], data[:, 1].astype(np.int64)
    dt = float(t[1] - t[0])
    if dt <= 0 or not np.allclose(np.diff(t), dt, rtol=1e-9, atol=1e-12):
        raise ValueError(f"{src}: t must be evenly spaced and increasing")
    moved = np.flatnonzero(np.diff(x))
    path = PricePath.from_dense(int(x[0]), x[1:], moved, t0=0, meta={"source": src.name})
    path.dt = dt
    if dt < 1 and abs(1 / dt - round(1 / dt)) < 1e-9:
        path.steps_per_unit = round(1 / dt)
    return path


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
