"""Maslov model with order evaporation (or a fixed order lifetime).

Each step is one of three events, drawn with the book-size dependent weights
from :func:`maslov_event_probs`:

* deposition: a bid at ``x - 1`` or an ask at ``x + 1`` (fair coin);
* satisfaction: a sell or buy market order (fair coin) executes against the
  best bid or best ask and moves the price onto that order's tick; with the
  opposite side empty the step is consumed and nothing happens;
* evaporation: a uniformly chosen resting order disappears, price unchanged.

In the fixed-lifetime variant orders older than ``lifetime`` steps are
dropped at the start of every step and the event weights are the q=0 ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import Book, Order, PricePath, RngStream, Side
from .errors import ConfigError

EVAPORATION = "evaporation"
LIFETIME = "lifetime"

DEPOSIT, SATISFY, NOOP, EVAPORATE = "deposit", "satisfy", "noop", "evaporate"

# event-log cause labels
SATISFIED, EVAPORATED, EXPIRED, OPEN = "satisfied", "evaporated", "expired", "open"


@dataclass(frozen=True)
class MaslovConfig:
    q: float = 0.0
    nbar: float = 1.0
    removal: str = EVAPORATION
    lifetime: Optional[int] = None
    steps: int = 0
    burn_in: Optional[int] = None

    def __post_init__(self):
        if not 0 <= self.q < 1:
            raise ConfigError("q must lie in [0, 1)")
        if self.nbar < 1:
            raise ConfigError("nbar must be >= 1")
        if self.removal not in (EVAPORATION, LIFETIME):
            raise ConfigError(f"removal must be '{EVAPORATION}' or '{LIFETIME}'")
        if self.removal == LIFETIME and (self.lifetime is None or self.lifetime < 1):
            raise ConfigError("fixed-lifetime removal needs lifetime >= 1")
        if self.steps < 0 or (self.burn_in is not None and self.burn_in < 0):
            raise ConfigError("steps and burn_in must be non-negative")

    @property
    def effective_burn_in(self) -> int:
        if self.burn_in is not None:
            return self.burn_in
        scale = self.lifetime if self.removal == LIFETIME else self.nbar
        return int(100 * scale)


@dataclass
class MaslovState:
    book: Book = field(default_factory=Book)
    x: int = 0
    t: int = 0


@dataclass(frozen=True)
class Event:
    kind: str
    side: Optional[Side] = None
    price: Optional[int] = None


def maslov_event_probs(n, q, nbar):
    """Deposition, satisfaction and evaporation probabilities for ``n`` resting orders.

    Works on floats and on :class:`fractions.Fraction` alike; with exact
    inputs the three values sum to exactly one.
    """
    denom = 2 + q * (n / nbar - 1)
    return 1 / denom, (1 - q) / denom, q * (n / nbar) / denom


def _log_removal(log, order: Order, t: int, cause: str) -> None:
    if log is not None:
        log.append((order.birth, t, order.price, int(order.side), cause))


def satisfy(state, side: Side, t: int, log=None) -> Event:
    """Market order of ``side`` (BID = sell into bids, ASK = buy from asks)."""
    book = state.book
    if book.count(side) == 0:
        return Event(NOOP, side)
    order = book.remove_best(side)
    _log_removal(log, order, t, SATISFIED)
    state.x = order.price
    return Event(SATISFY, side, order.price)


def evaporate(state, rng: RngStream, t: int, log=None) -> Event:
    # W_eva is 0 on an empty book, but the rounded W_dep + W_sat can fall
    # short of 1 by an ulp
    if len(state.book) == 0:
        return Event(NOOP)
    order = state.book.remove_uniform(rng)
    _log_removal(log, order, t, EVAPORATED)
    return Event(EVAPORATE, order.side, order.price)


def expire(state, lifetime: int, t: int, log=None) -> None:
    for order in state.book.expire(t, lifetime):
        _log_removal(log, order, t, EXPIRED)


def event_weights(n: int, config) -> tuple[float, float]:
    """(W_dep, W_sat) used by the step; evaporation takes the remainder."""
    if getattr(config, "removal", EVAPORATION) == LIFETIME:
        return 0.5, 0.5
    w_dep, w_sat, _ = maslov_event_probs(n, config.q, float(config.nbar))
    return w_dep, w_sat


def maslov_step(state: MaslovState, config: MaslovConfig, rng: RngStream,
                log: Optional[list] = None) -> tuple[MaslovState, Event]:
    t = state.t
    if config.removal == LIFETIME:
        expire(state, config.lifetime, t, log)
    w_dep, w_sat = event_weights(len(state.book), config)
    u = rng.uniform()
    if u < w_dep:
        side = Side(rng.coin())
        c = state.x - 1 if side is Side.BID else state.x + 1
        state.book.insert(side, c, t)
        event = Event(DEPOSIT, side, c)
    elif u < w_dep + w_sat:
        event = satisfy(state, Side(rng.coin()), t, log)
    else:
        event = evaporate(state, rng, t, log)
    state.t += 1
    return state, event


def close_log(log: list, book: Book) -> list:
    """Append still-resting orders with an open death time."""
    for order in sorted(book.orders(), key=lambda o: o.serial):
        log.append((order.birth, None, order.price, int(order.side), OPEN))
    return log


def maslov_advance(state: MaslovState, config: MaslovConfig, nsteps: int,
                   rng: RngStream, log: Optional[list] = None):
    """Advance on the active backend; returns (prices, trade step indices)."""
    from ._backend import kernels

    return kernels().advance_maslov(state, config, int(nsteps), rng, log)


def maslov_run(config: MaslovConfig, rng: RngStream,
               state: Optional[MaslovState] = None,
               log: Optional[list] = None) -> PricePath:
    """Burn in and record. If ``log`` is a list it collects the order history
    of the measured window as ``(birth_t, death_t, tick, side, cause)`` rows."""
    if state is None:
        state = MaslovState()
    maslov_advance(state, config, config.effective_burn_in, rng)
    t0, x0 = state.t, state.x
    prices, trades = maslov_advance(state, config, config.steps, rng, log)
    if log is not None:
        close_log(log, state.book)
    meta = {"model": "maslov", "q": config.q, "nbar": config.nbar,
            "removal": config.removal, "lifetime": config.lifetime, "seed": rng.seed}
    return PricePath.from_dense(x0, prices, trades, t0=t0, meta=meta)
