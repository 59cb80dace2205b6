from fractions import Fraction

import numpy as np
import pytest

from orderbook_lab.bps import (BpsConfig, BpsState, bps_advance, bps_init, bps_meanfield_profile,
                               bps_run, bps_step, bps_time_profile)
from orderbook_lab.core import RngStream
from orderbook_lab.errors import ConfigError


def _state(L, bids, asks, price=None):
    N = len(bids)
    pos = np.array(list(bids) + list(asks), dtype=np.int64)
    occ_b = np.bincount(pos[:N], minlength=L + 2).astype(np.int64)
    occ_a = np.bincount(pos[N:], minlength=L + 2).astype(np.int64)
    return BpsState(L=L, N=N, pos=pos, occ_b=occ_b, occ_a=occ_a, price=price or L // 2)


class ScriptedRng(RngStream):
    """Feeds fixed ``below`` results to exercise one chosen move."""

    def __init__(self, values):
        super().__init__(0)
        self._values = list(values)

    def below(self, n):
        v = self._values.pop(0)
        assert 0 <= v < n
        return v


@pytest.mark.parametrize("kw", [dict(L=3, N=1), dict(L=1, N=1), dict(L=10, N=0)])
def test_config_rejects(kw):
    with pytest.raises(ConfigError):
        BpsConfig(**kw)


def test_init_layout(rng):
    s = bps_init(BpsConfig(L=20, N=5), rng)
    assert np.all((s.bids() >= 1) & (s.bids() <= 10))
    assert np.all((s.asks() >= 11) & (s.asks() <= 20))
    assert s.price == 10 and s.clock == 0
    s.check()


def test_init_smallest(rng):
    s = bps_init(BpsConfig(L=2, N=1), rng)
    assert list(s.pos) == [1, 2] and s.price == 1


def test_annihilation_reinjects_at_edges():
    L = 20
    s = _state(L, [5], [6])
    # particle 0 (bid) moving up: u = 2*0 + 1
    s, trade = bps_step(s, ScriptedRng([1]))
    assert trade == (1, 6)
    assert s.price == 6
    assert list(s.pos) == [1, L]
    s.check()


def test_rejected_boundary_move_costs_a_step():
    s = _state(20, [1], [15])
    s, trade = bps_step(s, ScriptedRng([0]))  # bid at 1 moving down
    assert trade is None and s.pos[0] == 1
    assert s.clock == Fraction(1, 2)


def test_move_without_contact():
    s = _state(20, [5], [7], price=9)
    s, trade = bps_step(s, ScriptedRng([1]))
    assert trade is None and s.pos[0] == 6 and s.price == 9


def test_same_species_stack():
    s = _state(20, [5, 6], [15, 16])
    s, trade = bps_step(s, ScriptedRng([1]))
    assert trade is None and s.occ_b[6] == 2


def test_picks_lowest_index_opposite():
    s = _state(20, [5, 1], [6, 6])
    s, trade = bps_step(s, ScriptedRng([1]))
    assert trade is not None
    assert list(s.pos) == [1, 1, 20, 6]


def test_conservation_and_clock(backend):
    cfg = BpsConfig(L=50, N=10)
    r = RngStream(3)
    s = bps_init(cfg, r)
    bps_advance(s, 100_000, r)
    s.check()
    assert len(s.bids()) == len(s.asks()) == 10
    assert s.clock == Fraction(100_000, 20)


def test_fronts_ordered_every_step(rng):
    s = bps_init(BpsConfig(L=30, N=8), rng)
    for _ in range(20_000):
        bps_step(s, rng)
        assert s.bids().max() < s.asks().min()
        assert 1 <= s.price <= 30


@pytest.mark.parametrize("y, expected", [(250, (0.0, 0.0)), (0, (4 * 200 / 500, 0.0)),
                                         (125, (0.8, 0.0)), (375, (0.0, 0.8))])
def test_meanfield_profile(y, expected):
    assert bps_meanfield_profile(BpsConfig(L=500, N=200), y) == pytest.approx(expected)


def test_meanfield_profile_domain():
    with pytest.raises(ValueError):
        bps_meanfield_profile(BpsConfig(L=10, N=1), 11)


def test_time_profile_wedge():
    cfg = BpsConfig(L=40, N=40)
    r = RngStream(8)
    s = bps_init(cfg, r)
    bps_advance(s, 10 * 40 * 40 * 80, r, record=False)
    rho_b, rho_a = bps_time_profile(s, r, samples=400)
    assert rho_b.sum() == pytest.approx(40) and rho_a.sum() == pytest.approx(40)
    assert rho_b[1:10].mean() > rho_b[15:20].mean()
    assert rho_a[31:40].mean() > rho_a[21:26].mean()


def test_run_records_trades():
    cfg = BpsConfig(L=20, N=5, steps=200_000, burn_in=10_000)
    p = bps_run(cfg, RngStream(4))
    assert p.n_trades > 0
    assert np.all(np.diff(p.trade_t) > 0)
    assert p.steps_per_unit == 10
    assert len(p.x) == 200_000 // 10 + 1
    # dense series equals the last trade price at every grid time
    grid = p.t0 + np.arange(len(p.x)) * 10
    k = np.searchsorted(p.trade_t, grid, side="right") - 1
    assert np.all(p.x[k >= 0] == p.trade_price[k[k >= 0]])
