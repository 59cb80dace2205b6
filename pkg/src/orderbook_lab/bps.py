"""Bak-Paczuski-Shubik two-species diffusion-annihilation market.

N bids (species B) and N asks (species A) hop on the sites ``1..L``. An
elementary update picks one of the 2N particles uniformly and moves it by
±1; a move off the segment is rejected but still costs one update. When a
particle lands on a site holding the opposite species the pair annihilates,
the price jumps to that site, and the pair is replaced by a bid at site 1
and an ask at site L. Time advances by 1/(2N) per update.

Particles ``0..N-1`` are bids, ``N..2N-1`` asks. Site occupation counts are
kept alongside the positions so contact checks are O(1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import PricePath, RngStream
from .errors import ConfigError


@dataclass(frozen=True)
class BpsConfig:
    L: int
    N: int
    steps: int = 0
    burn_in: Optional[int] = None
    sample_every: Optional[int] = None

    def __post_init__(self):
        if self.L < 2:
            raise ConfigError("L must be >= 2")
        if self.L % 2:
            raise ConfigError("L must be even so the midpoint L/2 is a site")
        if self.N < 1:
            raise ConfigError("N must be >= 1")
        if self.steps < 0 or (self.burn_in is not None and self.burn_in < 0):
            raise ConfigError("steps and burn_in must be non-negative")

    @property
    def effective_burn_in(self) -> int:
        # diffusive relaxation over the whole segment, in elementary updates
        if self.burn_in is not None:
            return self.burn_in
        return 10 * self.L * self.L * 2 * self.N

    @property
    def steps_per_unit(self) -> int:
        return 2 * self.N


@dataclass
class BpsState:
    L: int
    N: int
    pos: np.ndarray
    occ_b: np.ndarray
    occ_a: np.ndarray
    price: int
    step: int = 0

    @property
    def clock(self) -> Fraction:
        return Fraction(self.step, 2 * self.N)

    def bids(self) -> np.ndarray:
        return self.pos[: self.N]

    def asks(self) -> np.ndarray:
        return self.pos[self.N:]

    def check(self) -> None:
        b, a = self.bids(), self.asks()
        assert len(b) == self.N and len(a) == self.N
        assert b.min() >= 1 and a.max() <= self.L
        assert b.max() < a.min(), "bid and ask fronts crossed"
        assert np.array_equal(np.bincount(b, minlength=self.L + 2), self.occ_b)
        assert np.array_equal(np.bincount(a, minlength=self.L + 2), self.occ_a)


def bps_init(config: BpsConfig, rng: RngStream) -> BpsState:
    L, N = config.L, config.N
    half = L // 2
    pos = np.empty(2 * N, dtype=np.int64)
    for i in range(N):
        pos[i] = rng.integers(1, half)
    for i in range(N, 2 * N):
        pos[i] = rng.integers(half + 1, L)
    occ_b = np.bincount(pos[:N], minlength=L + 2).astype(np.int64)
    occ_a = np.bincount(pos[N:], minlength=L + 2).astype(np.int64)
    return BpsState(L=L, N=N, pos=pos, occ_b=occ_b, occ_a=occ_a, price=half)


def bps_step(state: BpsState, rng: RngStream) -> tuple[BpsState, Optional[tuple[int, int]]]:
    """One elementary update. Returns the trade ``(step, price)`` if one happened."""
    L, N = state.L, state.N
    u = rng.below(4 * N)
    i, up = u >> 1, u & 1
    here = int(state.pos[i])
    dest = here + 1 if up else here - 1
    state.step += 1
    if dest < 1 or dest > L:
        return state, None
    if i < N:
        own, other, lo, own_edge, other_edge = state.occ_b, state.occ_a, N, 1, L
    else:
        own, other, lo, own_edge, other_edge = state.occ_a, state.occ_b, 0, L, 1
    if other[dest] > 0:
        # lowest-index opposite particle on the site; they are interchangeable
        j = lo + int(np.flatnonzero(state.pos[lo:lo + N] == dest)[0])
        own[here] -= 1
        other[dest] -= 1
        state.pos[i] = own_edge
        own[own_edge] += 1
        state.pos[j] = other_edge
        other[other_edge] += 1
        state.price = dest
        return state, (state.step, dest)
    own[here] -= 1
    own[dest] += 1
    state.pos[i] = dest
    return state, None


def bps_advance(state: BpsState, nsteps: int, rng: RngStream,
                record: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Advance ``nsteps`` updates on the active backend; return trade arrays."""
    from ._backend import kernels

    return kernels().advance_bps(state, int(nsteps), rng, record)


def bps_run(config: BpsConfig, rng: RngStream,
            state: Optional[BpsState] = None) -> PricePath:
    """Burn in, then record ``config.steps`` updates.

    The dense series is sampled every ``sample_every`` updates (one model
    time unit by default); trades keep their exact update index.
    """
    if state is None:
        state = bps_init(config, rng)
    bps_advance(state, config.effective_burn_in, rng, record=False)
    t0, x0 = state.step, state.price
    trade_t, trade_price = bps_advance(state, config.steps, rng)
    return PricePath.from_trades(
        x0, trade_t, trade_price, t0=t0, total_steps=config.steps,
        steps_per_unit=config.steps_per_unit, sample_every=config.sample_every,
        meta={"model": "bps", "L": config.L, "N": config.N, "seed": rng.seed},
    )


def bps_meanfield_profile(config: BpsConfig, y: float) -> tuple[float, float]:
    """Fluctuation-free (rho_B, rho_A) wedge profile at position ``y``."""
    L, N = config.L, config.N
    if not 0 <= y <= L:
        raise ValueError("y must lie in [0, L]")
    scale = 8.0 * N / (L * L)
    half = L / 2
    return scale * max(half - y, 0.0), scale * max(y - half, 0.0)


def bps_time_profile(state: BpsState, rng: RngStream, samples: int,
                     every: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """Time-averaged site densities of bids and asks over ``samples`` snapshots."""
    every = every or 2 * state.N
    acc_b = np.zeros(state.L + 2)
    acc_a = np.zeros(state.L + 2)
    for _ in range(samples):
        bps_advance(state, every, rng, record=False)
        acc_b += state.occ_b
        acc_a += state.occ_a
    return acc_b / samples, acc_a / samples
