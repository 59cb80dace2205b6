"""Uniform Deposition Model.

Maslov's three-event dynamics on the bounded segment
``S = {-L/2, ..., L/2 - 1}``, except that a deposited order lands uniformly
on ``S`` minus the current price. Its side follows from where it lands:
above the price it is an ask, below it a bid. Off-centre prices therefore
bias arrivals toward the larger side of the segment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import PricePath, RngStream, Side
from .errors import ConfigError
from .maslov import (DEPOSIT, Event, MaslovState, close_log, evaporate,
                     event_weights, satisfy)


@dataclass(frozen=True)
class UdmConfig:
    L: int
    q: float
    nbar: float
    steps: int = 0
    burn_in: Optional[int] = None

    def __post_init__(self):
        if self.L < 4 or self.L % 2:
            raise ConfigError("L must be even and >= 4")
        if not 0 < self.q < 1:
            raise ConfigError("q must lie in (0, 1)")
        if self.nbar < 1:
            raise ConfigError("nbar must be >= 1")
        if self.steps < 0 or (self.burn_in is not None and self.burn_in < 0):
            raise ConfigError("steps and burn_in must be non-negative")

    @property
    def effective_burn_in(self) -> int:
        if self.burn_in is not None:
            return self.burn_in
        return int(10 * self.nbar / (1 - self.q))

    @property
    def lo(self) -> int:
        return -(self.L // 2)

    @property
    def hi(self) -> int:
        return self.L // 2 - 1


UdmState = MaslovState


def udm_deposit_tick(x: int, L: int, rng: RngStream) -> int:
    """Uniform tick on the segment, skipping the price itself."""
    c = -(L // 2) + rng.below(L - 1)
    return c + 1 if c >= x else c


def udm_step(state: UdmState, config: UdmConfig, rng: RngStream,
             log: Optional[list] = None) -> tuple[UdmState, Event]:
    t = state.t
    w_dep, w_sat = event_weights(len(state.book), config)
    u = rng.uniform()
    if u < w_dep:
        c = udm_deposit_tick(state.x, config.L, rng)
        side = Side.ASK if c > state.x else Side.BID
        state.book.insert(side, c, t)
        event = Event(DEPOSIT, side, c)
    elif u < w_dep + w_sat:
        event = satisfy(state, Side(rng.coin()), t, log)
    else:
        event = evaporate(state, rng, t, log)
    state.t += 1
    return state, event


def udm_advance(state: UdmState, config: UdmConfig, nsteps: int, rng: RngStream,
                log: Optional[list] = None):
    from ._backend import kernels

    return kernels().advance_udm(state, config, int(nsteps), rng, log)


def udm_run(config: UdmConfig, rng: RngStream, state: Optional[UdmState] = None,
            log: Optional[list] = None) -> PricePath:
    if state is None:
        state = UdmState()
    udm_advance(state, config, config.effective_burn_in, rng)
    t0, x0 = state.t, state.x
    prices, trades = udm_advance(state, config, config.steps, rng, log)
    if log is not None:
        close_log(log, state.book)
    meta = {"model": "udm", "L": config.L, "q": config.q, "nbar": config.nbar,
            "seed": rng.seed}
    return PricePath.from_dense(x0, prices, trades, t0=t0, meta=meta)
