import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orderbook_lab.core import (Book, BookError, Order, PricePath, RngStream, Side, book_best,
                                book_expire, book_insert, book_remove_best, book_remove_uniform)


def test_side_opposite():
    assert Side.BID.opposite is Side.ASK
    assert Side.ASK.opposite is Side.BID
    assert len(Side) == 2


class TestRng:
    def test_same_seed_same_stream(self):
        a, b = RngStream(7), RngStream(7)
        assert [a.next_u64() for _ in range(20)] == [b.next_u64() for _ in range(20)]

    def test_seed_required(self):
        with pytest.raises((TypeError, ValueError)):
            RngStream(None)

    def test_below_range_and_uniformity(self):
        r = RngStream(1)
        draws = np.array([r.below(7) for _ in range(70_000)])
        assert draws.min() == 0 and draws.max() == 6
        counts = np.bincount(draws)
        assert np.all(np.abs(counts - 10_000) < 5 * np.sqrt(10_000))

    def test_integers_inclusive(self):
        r = RngStream(2)
        vals = {r.integers(3, 5) for _ in range(500)}
        assert vals == {3, 4, 5}

    def test_uniform_in_unit_interval(self):
        r = RngStream(3)
        u = np.array([r.uniform() for _ in range(10_000)])
        assert u.min() >= 0 and u.max() < 1
        assert abs(u.mean() - 0.5) < 0.01

    def test_bernoulli_and_choice(self):
        r = RngStream(4)
        assert not any(r.bernoulli(0.0) for _ in range(100))
        assert all(r.bernoulli(1.0) for _ in range(100))
        assert {r.choice("abc") for _ in range(200)} == set("abc")

    def test_spawn_offsets_seed(self):
        assert RngStream(10).spawn(3).seed == 13


class TestBookExamples:
    def test_insert(self):
        b = Book()
        b.insert(Side.BID, 5, 0)
        assert b.n_bid == 1 and b.best_bid() == 5
        b.insert(Side.BID, 5, 1)
        assert b.n_bid == 2 and b.best_bid() == 5
        b.insert(Side.ASK, 9, 2)
        assert (b.best_bid(), b.best_ask()) == (5, 9)

    def test_functional_insert(self):
        b = book_insert(Book(), Order(Side.BID, 5, 0, 0))
        assert book_best(b, Side.BID) == 5

    def test_best(self):
        b = Book()
        for side, p in [(Side.BID, 3), (Side.BID, 7), (Side.ASK, 9)]:
            b.insert(side, p, 0)
        assert book_best(b, Side.BID) == 7
        assert book_best(b, Side.ASK) == 9
        assert book_best(Book(), Side.BID) is None

    def test_remove_best(self):
        b = Book()
        b.insert(Side.BID, 3, 0)
        b.insert(Side.BID, 7, 1)
        b, o = book_remove_best(b, Side.BID)
        assert o.price == 7 and b.best_bid() == 3

    def test_remove_best_tie_oldest_first(self):
        b = Book()
        first = b.insert(Side.ASK, 9, 0)
        b.insert(Side.ASK, 9, 1)
        _, o = book_remove_best(b, Side.ASK)
        assert o.serial == first.serial
        assert b.n_ask == 1 and b.best_ask() == 9

    def test_remove_best_empty(self):
        with pytest.raises(BookError):
            book_remove_best(Book(), Side.ASK)

    def test_remove_uniform_single(self, rng):
        b = Book()
        b.insert(Side.BID, 3, 0)
        _, o = book_remove_uniform(b, rng)
        assert o.price == 3 and len(b) == 0
        with pytest.raises(BookError):
            book_remove_uniform(b, rng)

    @pytest.mark.parametrize("layout, expected", [
        ([(Side.BID, 3), (Side.ASK, 9), (Side.ASK, 11)], 2 / 3),
        ([(Side.BID, 3), (Side.ASK, 9)], 0.5),
    ])
    def test_remove_uniform_frequency(self, layout, expected):
        r = RngStream(99)
        n, asks = 200_000, 0
        for _ in range(n):
            b = Book()
            for side, p in layout:
                b.insert(side, p, 0)
            asks += b.remove_uniform(r).side is Side.ASK
        assert abs(asks / n - expected) < 4 * np.sqrt(expected * (1 - expected) / n)

    def test_remove_uniform_bid_frequency_1e6(self):
        # removal index is below(2) on a two-order book
        r = RngStream(5)
        b = Book()
        b.insert(Side.BID, 3, 0)
        b.insert(Side.ASK, 9, 0)
        bid_slot = [o.side for o in b.orders()].index(Side.BID)
        freq = np.mean([r.below(2) == bid_slot for _ in range(1_000_000)])
        assert abs(freq - 0.5) < 0.002

    def test_expire_boundary(self):
        N = 10
        b = Book()
        b.insert(Side.BID, 1, 0)
        b.insert(Side.BID, 2, 1)
        b, n = book_expire(b, N, N)
        assert n == 1 and b.best_bid() == 2
        assert book_expire(Book(), 5, 3)[1] == 0
        with pytest.raises(ValueError):
            b.expire(0, 0)

    def test_arrays_roundtrip(self):
        b = Book()
        for k, (s, p) in enumerate([(0, 3), (1, 9), (0, 5), (1, 7)]):
            b.insert(Side(s), p, k)
        b.remove_best(Side.ASK)
        c = Book.from_arrays(*b.to_arrays(), next_serial=b.next_serial)
        assert [o for o in c.orders()] == [o for o in b.orders()]
        assert (c.best_bid(), c.best_ask()) == (b.best_bid(), b.best_ask())
        assert [o.serial for o in c.expire(100, 1)] == [o.serial for o in b.expire(100, 1)]


class NaiveBook:
    """List-based reference with the same tie and removal rules."""

    def __init__(self):
        self.orders = []
        self.serial = 0

    def insert(self, side, price, birth):
        self.orders.append(Order(side, price, birth, self.serial))
        self.serial += 1

    def best(self, side):
        same = [o for o in self.orders if o.side is side]
        if not same:
            return None
        key = (lambda o: (-o.price, o.serial)) if side is Side.BID else (lambda o: (o.price, o.serial))
        return min(same, key=key)

    def expire(self, now, lifetime):
        gone = sorted((o for o in self.orders if o.birth <= now - lifetime), key=lambda o: o.serial)
        self.orders = [o for o in self.orders if o.birth > now - lifetime]
        return gone


ops = st.lists(st.tuples(st.sampled_from(["ins", "best", "uni", "exp"]),
                         st.integers(0, 1), st.integers(-20, 20)), max_size=300)


@settings(max_examples=150, deadline=None)
@given(ops, st.integers(0, 2 ** 32))
def test_book_matches_naive_reference(sequence, seed):
    rng = RngStream(seed)
    book, ref, now = Book(), NaiveBook(), 0
    for op, s, p in sequence:
        side = Side(s)
        now += 1
        if op == "ins":
            book.insert(side, p, now)
            ref.insert(side, p, now)
        elif op == "best":
            want = ref.best(side)
            if want is None:
                with pytest.raises(BookError):
                    book.remove_best(side)
            else:
                got = book.remove_best(side)
                assert got == want
                ref.orders.remove(want)
        elif op == "uni" and len(ref.orders):
            got = book.remove_uniform(rng)
            assert got in ref.orders
            ref.orders.remove(got)
        elif op == "exp":
            assert book.expire(now, abs(p) + 1) == ref.expire(now, abs(p) + 1)
        assert len(book) == len(ref.orders)
        assert book.n_bid == sum(o.side is Side.BID for o in ref.orders)
        assert book.n_ask == sum(o.side is Side.ASK for o in ref.orders)
        for sd in Side:
            want = ref.best(sd)
            assert book.best(sd) == (None if want is None else want.price)
        assert sorted(book.orders(), key=lambda o: o.serial) == sorted(ref.orders, key=lambda o: o.serial)


def test_book_counts_after_1e6_random_ops():
    r = np.random.default_rng(0)
    rng = RngStream(0)
    book = Book()
    ops = r.integers(0, 4, 1_000_000)
    prices = r.integers(-50, 50, 1_000_000)
    n_b = n_a = 0
    for k, (op, p) in enumerate(zip(ops, prices)):
        if op < 2:
            book.insert(Side(op), int(p), k)
            n_b += op == 0
            n_a += op == 1
        elif op == 2 and len(book):
            o = book.remove_uniform(rng)
            n_b -= o.side is Side.BID
            n_a -= o.side is Side.ASK
        elif op == 3:
            side = Side(k & 1)
            if book.count(side):
                book.remove_best(side)
                n_b -= side is Side.BID
                n_a -= side is Side.ASK
    assert (book.n_bid, book.n_ask) == (n_b, n_a)
    side = book.to_arrays()[0]
    assert (np.sum(side == 0), np.sum(side == 1)) == (n_b, n_a)


class TestPricePath:
    def test_from_dense(self):
        p = PricePath.from_dense(5, np.array([5, 7, 7, 4]), np.array([1, 3]), t0=10)
        assert list(p.x) == [5, 5, 7, 7, 4]
        assert list(p.trade_t) == [12, 14]
        assert list(p.trade_price) == [7, 4]
        assert list(p.trade_return) == [2, -3]
        assert list(p.returns()) == [0, 2, 0, -3]
        assert list(p.waiting_times()) == [2]

    def test_from_trades_grid(self):
        p = PricePath.from_trades(10, [3, 9], [12, 8], t0=0, total_steps=10, steps_per_unit=2)
        assert p.dt == 1.0
        # grid at steps 0,2,...,10; trade at step 3 visible from step 4 on
        assert list(p.x) == [10, 10, 12, 12, 12, 8]
        assert list(p.trade_return) == [2, -4]
        assert list(p.waiting_times()) == [3.0]
        # price is constant between trades
        assert np.all(np.diff(p.x)[[0, 2, 3]] == 0)
