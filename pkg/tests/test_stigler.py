import numpy as np
import pytest

from orderbook_lab.core import Book, RngStream, Side
from orderbook_lab.errors import ConfigError
from orderbook_lab.stigler import (StiglerConfig, StiglerState, free_windows, place_and_match,
                                   stigler_advance, stigler_init, stigler_run, stigler_step)


def test_free_requires_d_at_least_2s():
    with pytest.raises(ConfigError, match="2s"):
        StiglerConfig("free", N=10, s=5, d=9)
    StiglerConfig("free", N=10, s=5, d=10)


@pytest.mark.parametrize("kw", [dict(variant="bounded", N=10, L=1), dict(variant="other", N=1),
                                dict(variant="bounded", N=0, L=10), dict(variant="free", N=10, s=1)])
def test_config_rejects(kw):
    with pytest.raises(ConfigError):
        StiglerConfig(**kw)


def test_bid_crossing_trades_at_ask():
    st = StiglerState(x=5)
    st.book.insert(Side.ASK, 10, 0)
    assert place_and_match(st, Side.BID, 12) == 10
    assert st.x == 10 and len(st.book) == 0


def test_bid_below_ask_rests():
    st = StiglerState(x=5)
    st.book.insert(Side.ASK, 10, 0)
    assert place_and_match(st, Side.BID, 7) is None
    assert (st.book.best_bid(), st.book.best_ask()) == (7, 10) and st.x == 5


def test_free_window_example():
    bid_lo, ask_lo = free_windows(0, 4000, 10_000)
    bids = np.arange(bid_lo, bid_lo + 10_000)
    asks = np.arange(ask_lo, ask_lo + 10_000)
    assert (bids[0], bids[-1]) == (-8999, 1000)
    assert np.all((-9000 < bids) & (bids <= 1000))
    assert np.all((-1000 <= asks) & (asks < 9000))


@pytest.mark.parametrize("x, s, d", [(0, 0, 1), (3, 1, 3), (-7, 2, 5), (10, 3, 7), (0, 4, 8)])
def test_free_windows_follow_strict_inequalities(x, s, d):
    bid_lo, ask_lo = free_windows(x, s, d)
    ticks = np.arange(-100, 100)
    bid_set = ticks[(x - s - d / 2 < ticks) & (ticks <= x - s + d / 2)]
    ask_set = ticks[(x + s - d / 2 <= ticks) & (ticks < x + s + d / 2)]
    assert list(range(bid_lo, bid_lo + d)) == list(bid_set)
    assert list(range(ask_lo, ask_lo + d)) == list(ask_set)


def test_expiry_before_deposit(rng):
    cfg = StiglerConfig("bounded", N=3, L=1000)
    st = stigler_init(cfg)
    for _ in range(50):
        stigler_step(st, cfg, rng)
        assert len(st.book) <= cfg.N
        assert all(st.t - o.birth <= cfg.N for o in st.book.orders())


def test_bounded_invariants(rng):
    cfg = StiglerConfig("bounded", N=200, L=100)
    st = stigler_init(cfg)
    assert st.x == 50
    for _ in range(20_000):
        before = len(st.book)
        _, trade = stigler_step(st, cfg, rng)
        st.book.check()
        assert 1 <= st.x <= 100
        assert len(st.book) <= cfg.N
        if trade is not None:
            # incoming order and one resting order gone (after at most one expiry)
            assert len(st.book) in (before - 1, before - 2)


def test_free_deposits_inside_window(rng):
    cfg = StiglerConfig("free", N=50, s=3, d=9)
    st = stigler_init(cfg)
    for _ in range(5000):
        x = st.x
        serial = st.book.next_serial
        _, trade = stigler_step(st, cfg, rng)
        st.book.check()
        if trade is None:
            o = next(o for o in st.book.orders() if o.serial == serial)
            if o.side is Side.BID:
                assert x - 3 - 4.5 < o.price <= x - 3 + 4.5
            else:
                assert x + 3 - 4.5 <= o.price < x + 3 + 4.5


def test_run_returns_zero_on_quiet_steps():
    cfg = StiglerConfig("free", N=100, s=10, d=20, steps=10_000, burn_in=1000)
    p = stigler_run(cfg, RngStream(1))
    r = p.returns()
    assert len(r) == 10_000
    assert set(np.flatnonzero(r)) <= set(p.trade_t - p.t0 - 1)


def test_bounded_returns_below_L():
    cfg = StiglerConfig("bounded", N=500, L=500, steps=200_000)
    p = stigler_run(cfg, RngStream(2))
    assert np.abs(p.returns()).max() <= 499
