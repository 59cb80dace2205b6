"""Shared domain types: sides, orders, the order book, price paths and the RNG.

The book is a multiset of unit-volume orders on an integer tick axis. Every
model in the package drives the same container, and the compiled kernels in
:mod:`orderbook_lab._kernels` mirror its semantics exactly, so a run produces
the same path whichever backend executes it.

Determinism rules shared with the compiled book:

* the best order on a side is the lexicographic minimum of ``(price, serial)``
  for asks and ``(-price, serial)`` for bids, i.e. oldest first on ties;
* orders live in a flat array; removing index ``k`` moves the last entry
  into ``k`` (swap-remove), and uniform removal picks ``k`` uniformly;
* expiry removes orders in insertion order.
"""

from __future__ import annotations

import enum
import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

_TWO64 = 1 << 64
_INV53 = 1.0 / 9007199254740992.0


class Side(enum.IntEnum):
    BID = 0
    ASK = 1

    @property
    def opposite(self) -> "Side":
        return Side.ASK if self is Side.BID else Side.BID


class BookError(RuntimeError):
    """Raised when a model asks the book for something it cannot provide.

    These always indicate a logic error in the calling model (removing from
    an empty side, for example), never a property of the market.
    """


@dataclass(frozen=True)
class Order:
    side: Side
    price: int
    birth: int
    serial: int = field(default=-1, compare=False, repr=False)


class RngStream:
    """Seeded 64-bit stream with the draw primitives every model uses.

    Backed by numpy's PCG64. The compiled kernels consume the very same
    bit generator through its C interface and derive values with identical
    arithmetic, so interleaving Python-level steps with compiled runs keeps
    the stream intact.
    """

    def __init__(self, seed: int):
        if seed is None:
            raise ValueError("an explicit seed is required")
        self.seed = int(seed)
        self.bit_generator = np.random.PCG64(self.seed)
        self._raw = self.bit_generator.random_raw

    def next_u64(self) -> int:
        return self._raw()

    def below(self, n: int) -> int:
        """Uniform integer on ``[0, n)`` by rejection of the biased low range."""
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = (_TWO64 - n) % n
        raw = self._raw
        while True:
            x = raw()
            if x >= threshold:
                return x % n

    def integers(self, a: int, b: int) -> int:
        """Uniform integer on the closed range ``[a, b]``."""
        return a + self.below(b - a + 1)

    def uniform(self) -> float:
        return (self._raw() >> 11) * _INV53

    def bernoulli(self, p: float) -> bool:
        return self.uniform() < p

    def coin(self) -> int:
        return self._raw() >> 63

    def choice(self, items: Sequence[T]) -> T:
        return items[self.below(len(items))]

    def spawn(self, offset: int) -> "RngStream":
        return RngStream(self.seed + offset)


class Book:
    """Order book with O(log n) best-price access and O(1) uniform removal.

    Each side keeps a heap keyed on ``(±price, serial)`` with lazy deletion;
    a flat list with a serial -> index map backs uniform draws; a FIFO of
    serials backs age-based expiry.
    """

    def __init__(self) -> None:
        self._flat: list[Order] = []
        self._index: dict[int, int] = {}
        self._heaps: tuple[list, list] = ([], [])
        self._counts = [0, 0]
        self._fifo: deque[Order] = deque()
        self.next_serial = 0

    def __len__(self) -> int:
        return len(self._flat)

    def __iter__(self):
        return iter(list(self._flat))

    @property
    def n_bid(self) -> int:
        return self._counts[Side.BID]

    @property
    def n_ask(self) -> int:
        return self._counts[Side.ASK]

    def count(self, side: Side) -> int:
        return self._counts[side]

    def orders(self) -> list[Order]:
        """Resting orders in flat (storage) order."""
        return list(self._flat)

    def insert(self, side: Side, price: int, birth: int) -> Order:
        side = Side(side)
        order = Order(side, int(price), int(birth), self.next_serial)
        self.next_serial += 1
        self._index[order.serial] = len(self._flat)
        self._flat.append(order)
        key = order.price if side is Side.ASK else -order.price
        heap = self._heaps[side]
        heapq.heappush(heap, (key, order.serial, order))
        self._counts[side] += 1
        if len(heap) > 2 * self._counts[side] + 64:
            heap[:] = [e for e in heap if e[1] in self._index]
            heapq.heapify(heap)
        self._fifo.append(order)
        return order

    def _discard(self, order: Order) -> None:
        k = self._index.pop(order.serial)
        last = self._flat.pop()
        if last.serial != order.serial:
            self._flat[k] = last
            self._index[last.serial] = k
        self._counts[order.side] -= 1
        if len(self._fifo) > 2 * len(self._flat) + 64:
            self._fifo = deque(o for o in self._fifo if o.serial in self._index)

    def _top(self, side: Side) -> Optional[Order]:
        heap = self._heaps[side]
        while heap and heap[0][1] not in self._index:
            heapq.heappop(heap)
        return heap[0][2] if heap else None

    def best(self, side: Side) -> Optional[int]:
        top = self._top(Side(side))
        return None if top is None else top.price

    def best_bid(self) -> Optional[int]:
        return self.best(Side.BID)

    def best_ask(self) -> Optional[int]:
        return self.best(Side.ASK)

    def remove_best(self, side: Side) -> Order:
        side = Side(side)
        top = self._top(side)
        if top is None:
            raise BookError(f"remove_best on empty {side.name} side")
        heapq.heappop(self._heaps[side])
        self._discard(top)
        return top

    def remove_at(self, k: int) -> Order:
        order = self._flat[k]
        self._discard(order)
        return order

    def remove_uniform(self, rng: RngStream) -> Order:
        if not self._flat:
            raise BookError("remove_uniform on empty book")
        return self.remove_at(rng.below(len(self._flat)))

    def expire(self, now: int, lifetime: int) -> list[Order]:
        """Remove every order with ``birth <= now - lifetime``; return them."""
        if lifetime < 1:
            raise ValueError("lifetime must be >= 1")
        cutoff = now - lifetime
        removed = []
        # _discard may compact the fifo, so re-read the attribute each pass
        while self._fifo:
            head = self._fifo[0]
            if head.serial not in self._index:
                self._fifo.popleft()
                continue
            if head.birth > cutoff:
                break
            self._fifo.popleft()
            self._discard(head)
            removed.append(head)
        return removed

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(side, price, birth, serial) columns in flat order."""
        n = len(self._flat)
        side = np.fromiter((o.side for o in self._flat), dtype=np.int64, count=n)
        price = np.fromiter((o.price for o in self._flat), dtype=np.int64, count=n)
        birth = np.fromiter((o.birth for o in self._flat), dtype=np.int64, count=n)
        serial = np.fromiter((o.serial for o in self._flat), dtype=np.int64, count=n)
        return side, price, birth, serial

    @classmethod
    def from_arrays(cls, side, price, birth, serial, next_serial: int) -> "Book":
        book = cls()
        orders = [
            Order(Side(int(s)), int(p), int(b), int(k))
            for s, p, b, k in zip(side, price, birth, serial)
        ]
        for k, order in enumerate(orders):
            book._flat.append(order)
            book._index[order.serial] = k
            key = order.price if order.side is Side.ASK else -order.price
            book._heaps[order.side].append((key, order.serial, order))
            book._counts[order.side] += 1
        for heap in book._heaps:
            heapq.heapify(heap)
        book._fifo.extend(sorted(orders, key=lambda o: o.serial))
        book.next_serial = int(next_serial)
        return book

    def check(self) -> None:
        """Assert internal consistency and the no-crossing invariant."""
        assert self._counts[0] + self._counts[1] == len(self._flat)
        assert sum(o.side is Side.BID for o in self._flat) == self._counts[0]
        bb, ba = self.best_bid(), self.best_ask()
        if bb is not None and ba is not None:
            assert bb < ba, f"crossed book: best bid {bb} >= best ask {ba}"


# Functional spellings used throughout the tests and docs.

def book_insert(book: Book, order: Order) -> Book:
    book.insert(order.side, order.price, order.birth)
    return book


def book_best(book: Book, side: Side) -> Optional[int]:
    return book.best(side)


def book_remove_best(book: Book, side: Side) -> tuple[Book, Order]:
    return book, book.remove_best(side)


def book_remove_uniform(book: Book, rng: RngStream) -> tuple[Book, Order]:
    return book, book.remove_uniform(rng)


def book_expire(book: Book, now: int, lifetime: int) -> tuple[Book, int]:
    return book, len(book.expire(now, lifetime))


@dataclass
class PricePath:
    """Price history of one run.

    ``x`` is the dense price series sampled every ``dt`` model time units;
    ``x[0]`` is the price at the start of the measurement window. Trades
    are stored sparsely: ``trade_t`` holds the elementary step after which
    each trade happened (``steps_per_unit`` elementary steps make one model
    time unit), ``trade_price`` the price it set and ``trade_return`` the
    jump it caused. ``aux`` carries optional per-step side series (the
    Genoa volatility, for instance) aligned with ``x[1:]``.
    """

    x: np.ndarray
    trade_t: np.ndarray
    trade_price: np.ndarray
    trade_return: np.ndarray
    dt: float = 1.0
    steps_per_unit: int = 1
    t0: int = 0
    meta: dict = field(default_factory=dict)
    aux: dict = field(default_factory=dict)

    @classmethod
    def from_dense(cls, x0: int, prices: np.ndarray, trade_idx: np.ndarray,
                   t0: int = 0, meta: Optional[dict] = None) -> "PricePath":
        """Build from a per-step kernel output (``prices[k]`` follows step k)."""
        x = np.empty(len(prices) + 1, dtype=np.int64)
        x[0] = x0
        x[1:] = prices
        trade_idx = np.asarray(trade_idx, dtype=np.int64)
        trade_price = x[trade_idx + 1]
        trade_return = trade_price - x[trade_idx]
        return cls(x=x, trade_t=trade_idx + t0 + 1, trade_price=trade_price,
                   trade_return=trade_return, t0=t0, meta=dict(meta or {}))

    @classmethod
    def from_trades(cls, x0: int, trade_t: np.ndarray, trade_price: np.ndarray,
                    t0: int, total_steps: int, steps_per_unit: int,
                    sample_every: Optional[int] = None,
                    meta: Optional[dict] = None) -> "PricePath":
        """Build from sparse trades, sampling the dense series on a grid."""
        trade_t = np.asarray(trade_t, dtype=np.int64)
        trade_price = np.asarray(trade_price, dtype=np.int64)
        every = int(sample_every or steps_per_unit)
        grid = t0 + np.arange(0, total_steps + 1, every, dtype=np.int64)
        prices = np.concatenate([[x0], trade_price])
        x = prices[np.searchsorted(trade_t, grid, side="right")]
        prev = np.concatenate([[x0], trade_price[:-1]])
        return cls(x=x.astype(np.int64), trade_t=trade_t, trade_price=trade_price,
                   trade_return=trade_price - prev, dt=every / steps_per_unit,
                   steps_per_unit=steps_per_unit, t0=t0, meta=dict(meta or {}))

    def __len__(self) -> int:
        return len(self.x)

    @property
    def n_trades(self) -> int:
        return len(self.trade_t)

    def returns(self) -> np.ndarray:
        """One-step returns ``x_t - x_{t-1}`` of the dense series."""
        return np.diff(self.x)

    def waiting_times(self) -> np.ndarray:
        """Inter-trade times in model time units."""
        return np.diff(self.trade_t) / self.steps_per_unit

    def trade_times(self) -> np.ndarray:
        return self.trade_t / self.steps_per_unit
