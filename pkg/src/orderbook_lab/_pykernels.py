"""Pure-Python kernels: the step functions looped, with the compiled API.

Slow (a few microseconds per step) but exact: for the same seed they produce
the same paths as :mod:`orderbook_lab._kernels`, which the backend tests rely
on.
"""

from __future__ import annotations

import numpy as np

from .bps import bps_step
from .genoa import genoa_step
from .maslov import maslov_step
from .stigler import stigler_step
from .udm import udm_step

NAME = "python"


def advance_bps(state, nsteps, rng, record=True):
    trade_t, trade_price = [], []
    for _ in range(nsteps):
        _, trade = bps_step(state, rng)
        if trade is not None and record:
            trade_t.append(trade[0])
            trade_price.append(trade[1])
    return np.array(trade_t, dtype=np.int64), np.array(trade_price, dtype=np.int64)


def _loop(step, state, nsteps, *args):
    prices = np.empty(nsteps, dtype=np.int64)
    traded = np.zeros(nsteps, dtype=bool)
    for k in range(nsteps):
        _, trade = step(state, *args)
        prices[k] = state.x
        traded[k] = trade is not None
    return prices, np.flatnonzero(traded).astype(np.int64)


def advance_stigler(state, config, nsteps, rng):
    return _loop(stigler_step, state, nsteps, config, rng)


def advance_genoa(state, config, nsteps, rng, record_v=True):
    prices = np.empty(nsteps, dtype=np.int64)
    traded = np.zeros(nsteps, dtype=bool)
    v = np.empty(nsteps) if record_v else None
    for k in range(nsteps):
        _, trade = genoa_step(state, config, rng)
        prices[k] = state.x
        traded[k] = trade is not None
        if record_v:
            v[k] = state.v
    return prices, np.flatnonzero(traded).astype(np.int64), v


def _event_loop(step, state, config, nsteps, rng, log):
    prices = np.empty(nsteps, dtype=np.int64)
    traded = np.zeros(nsteps, dtype=bool)
    for k in range(nsteps):
        _, event = step(state, config, rng, log)
        prices[k] = state.x
        traded[k] = event.kind == "satisfy"
    return prices, np.flatnonzero(traded).astype(np.int64)


def advance_maslov(state, config, nsteps, rng, log=None):
    return _event_loop(maslov_step, state, config, nsteps, rng, log)


def advance_udm(state, config, nsteps, rng, log=None):
    return _event_loop(udm_step, state, config, nsteps, rng, log)
