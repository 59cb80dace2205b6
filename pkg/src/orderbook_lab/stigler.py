"""Stigler model and its free (unbounded log-price) variant.

One order arrives per step, bid or ask with equal odds. Before it arrives,
the order deposited exactly ``N`` steps earlier is dropped if still resting.
A bid at or above the best ask trades at the ask's tick and both orders
vanish; otherwise it rests (asks symmetric).

Bounded: orders land uniformly on ``1..L``.
Free: bids land uniformly on ``x-s-d/2 < c <= x-s+d/2`` and asks on
``x+s-d/2 <= c < x+s+d/2`` around the current price ``x``; both windows hold
exactly ``d`` integer ticks for any parity of ``d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import Book, PricePath, RngStream, Side
from .errors import ConfigError

BOUNDED = "bounded"
FREE = "free"


@dataclass(frozen=True)
class StiglerConfig:
    variant: str
    N: int
    L: Optional[int] = None
    s: Optional[int] = None
    d: Optional[int] = None
    steps: int = 0
    burn_in: Optional[int] = None

    def __post_init__(self):
        if self.variant not in (BOUNDED, FREE):
            raise ConfigError(f"variant must be '{BOUNDED}' or '{FREE}'")
        if self.N < 1:
            raise ConfigError("N (order lifetime) must be >= 1")
        if self.variant == BOUNDED:
            if self.L is None or self.L < 2:
                raise ConfigError("bounded Stigler needs L >= 2")
        else:
            if self.s is None or self.d is None:
                raise ConfigError("free Stigler needs both s and d")
            if self.d < 1 or self.s < 0:
                raise ConfigError("free Stigler needs d >= 1 and s >= 0")
            if self.d < 2 * self.s:
                raise ConfigError(
                    "d must be >= 2s: bid and ask windows never overlap otherwise, so no trade can happen")
        if self.steps < 0 or (self.burn_in is not None and self.burn_in < 0):
            raise ConfigError("steps and burn_in must be non-negative")

    @property
    def effective_burn_in(self) -> int:
        return 10 * self.N if self.burn_in is None else self.burn_in


@dataclass
class StiglerState:
    book: Book = field(default_factory=Book)
    x: int = 0
    t: int = 0


def free_windows(x: int, s: int, d: int) -> tuple[int, int]:
    """Lowest tick of the bid window and of the ask window (each ``d`` wide)."""
    return x - s - (d + 1) // 2 + 1, x + s - d // 2


def stigler_init(config: StiglerConfig) -> StiglerState:
    x0 = config.L // 2 if config.variant == BOUNDED else 0
    return StiglerState(x=x0)


def place_and_match(state: StiglerState, side: Side, c: int) -> Optional[int]:
    """Submit an order at tick ``c``; trade against the best opposite quote.

    Returns the trade price or None if the order came to rest.
    """
    book = state.book
    if side is Side.BID:
        best = book.best_ask()
        if best is not None and best <= c:
            book.remove_best(Side.ASK)
            state.x = best
            return best
    else:
        best = book.best_bid()
        if best is not None and best >= c:
            book.remove_best(Side.BID)
            state.x = best
            return best
    book.insert(side, c, state.t)
    return None


def windowed_step(state: StiglerState, lifetime: int, s: int, d: int,
                  rng: RngStream) -> Optional[int]:
    """Free-variant step with an explicit window; shared with the Genoa model."""
    state.book.expire(state.t, lifetime)
    side = Side(rng.coin())
    bid_lo, ask_lo = free_windows(state.x, s, d)
    c = (bid_lo if side is Side.BID else ask_lo) + rng.below(d)
    trade = place_and_match(state, side, c)
    state.t += 1
    return trade


def stigler_step(state: StiglerState, config: StiglerConfig,
                 rng: RngStream) -> tuple[StiglerState, Optional[int]]:
    if config.variant == FREE:
        return state, windowed_step(state, config.N, config.s, config.d, rng)
    state.book.expire(state.t, config.N)
    side = Side(rng.coin())
    c = 1 + rng.below(config.L)
    trade = place_and_match(state, side, c)
    state.t += 1
    return state, trade


def stigler_advance(state: StiglerState, config: StiglerConfig, nsteps: int,
                    rng: RngStream):
    """Advance on the active backend; returns (prices, trade step indices)."""
    from ._backend import kernels

    return kernels().advance_stigler(state, config, int(nsteps), rng)


def stigler_run(config: StiglerConfig, rng: RngStream,
                state: Optional[StiglerState] = None) -> PricePath:
    if state is None:
        state = stigler_init(config)
    stigler_advance(state, config, config.effective_burn_in, rng)
    t0, x0 = state.t, state.x
    prices, trades = stigler_advance(state, config, config.steps, rng)
    meta = {"model": "stigler", "variant": config.variant, "N": config.N,
            "L": config.L, "s": config.s, "d": config.d, "seed": rng.seed}
    return PricePath.from_dense(x0, prices, trades, t0=t0, meta=meta)
