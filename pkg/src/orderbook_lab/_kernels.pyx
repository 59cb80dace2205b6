# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for all five model families.

Every kernel reproduces its pure-Python step function draw for draw: the
same bit generator (through numpy's C interface), the same integer and
float arithmetic, the same book tie-breaks and swap-remove order. Do not
build with -ffast-math or FMA contraction; the Maslov event thresholds
must round exactly as in Python.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport ceil, floor, fabs
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memcpy
from numpy.random cimport bitgen_t

import numpy as np

NAME = "cython"

cdef enum:
    BID = 0
    ASK = 1

cdef double INV53 = 1.0 / 9007199254740992.0


cdef bitgen_t* _bitgen(rng) except NULL:
    capsule = rng.bit_generator.capsule
    return <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef inline uint64_t _below(bitgen_t* g, uint64_t n) noexcept nogil:
    cdef uint64_t threshold = (<uint64_t> 0 - n) % n
    cdef uint64_t x
    while True:
        x = g.next_uint64(g.state)
        if x >= threshold:
            return x % n


cdef inline double _uniform(bitgen_t* g) noexcept nogil:
    return (g.next_uint64(g.state) >> 11) * INV53


cdef inline int _coin(bitgen_t* g) noexcept nogil:
    return <int> (g.next_uint64(g.state) >> 63)


cdef int64_t* _grow(int64_t* buf, int64_t new_cap) except NULL:
    cdef int64_t* out = <int64_t*> realloc(buf, new_cap * sizeof(int64_t))
    if out == NULL:
        raise MemoryError()
    return out


cdef class _I64Buf:
    """Append-only int64 buffer."""
    cdef int64_t* data
    cdef int64_t n, cap

    def __cinit__(self):
        self.cap = 1024
        self.n = 0
        self.data = <int64_t*> malloc(self.cap * sizeof(int64_t))
        if self.data == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.data)

    cdef inline int push(self, int64_t v) except -1:
        if self.n == self.cap:
            self.cap *= 2
            self.data = _grow(self.data, self.cap)
        self.data[self.n] = v
        self.n += 1
        return 0

    cdef object array(self):
        out = np.empty(self.n, dtype=np.int64)
        cdef int64_t[::1] view = out
        if self.n:
            memcpy(&view[0], self.data, self.n * sizeof(int64_t))
        return out


cdef class _CBook:
    """Slot-pool book: indexed binary heap per side, flat array, FIFO ring."""
    cdef int64_t* price
    cdef int64_t* birth
    cdef int64_t* serial
    cdef int64_t* side
    cdef int64_t* flatpos
    cdef int64_t* heappos
    cdef int64_t* flat
    cdef int64_t* heap0
    cdef int64_t* heap1
    cdef int64_t* freelist
    cdef int64_t cap, nslots, nflat, hn0, hn1, nfree, next_serial
    cdef int64_t* ring_slot
    cdef int64_t* ring_serial
    cdef int64_t ring_cap, ring_head, ring_n
    cdef bint use_fifo

    def __cinit__(self, int64_t cap=64, bint use_fifo=False):
        cdef int64_t c = cap if cap > 64 else 64
        self.cap = c
        self.price = <int64_t*> malloc(c * sizeof(int64_t))
        self.birth = <int64_t*> malloc(c * sizeof(int64_t))
        self.serial = <int64_t*> malloc(c * sizeof(int64_t))
        self.side = <int64_t*> malloc(c * sizeof(int64_t))
        self.flatpos = <int64_t*> malloc(c * sizeof(int64_t))
        self.heappos = <int64_t*> malloc(c * sizeof(int64_t))
        self.flat = <int64_t*> malloc(c * sizeof(int64_t))
        self.heap0 = <int64_t*> malloc(c * sizeof(int64_t))
        self.heap1 = <int64_t*> malloc(c * sizeof(int64_t))
        self.freelist = <int64_t*> malloc(c * sizeof(int64_t))
        self.ring_cap = c
        self.ring_slot = <int64_t*> malloc(c * sizeof(int64_t))
        self.ring_serial = <int64_t*> malloc(c * sizeof(int64_t))
        if (self.price == NULL or self.birth == NULL or self.serial == NULL
                or self.side == NULL or self.flatpos == NULL or self.heappos == NULL
                or self.flat == NULL or self.heap0 == NULL or self.heap1 == NULL
                or self.freelist == NULL or self.ring_slot == NULL or self.ring_serial == NULL):
            raise MemoryError()
        self.nslots = self.nflat = self.hn0 = self.hn1 = self.nfree = 0
        self.ring_head = self.ring_n = 0
        self.next_serial = 0
        self.use_fifo = use_fifo

    def __dealloc__(self):
        free(self.price); free(self.birth); free(self.serial); free(self.side)
        free(self.flatpos); free(self.heappos); free(self.flat)
        free(self.heap0); free(self.heap1); free(self.freelist)
        free(self.ring_slot); free(self.ring_serial)

    cdef int _grow_slots(self) except -1:
        cdef int64_t c = self.cap * 2
        self.price = _grow(self.price, c)
        self.birth = _grow(self.birth, c)
        self.serial = _grow(self.serial, c)
        self.side = _grow(self.side, c)
        self.flatpos = _grow(self.flatpos, c)
        self.heappos = _grow(self.heappos, c)
        self.flat = _grow(self.flat, c)
        self.heap0 = _grow(self.heap0, c)
        self.heap1 = _grow(self.heap1, c)
        self.freelist = _grow(self.freelist, c)
        self.cap = c
        return 0

    cdef int _ring_push(self, int64_t slot, int64_t ser) except -1:
        cdef int64_t c, k
        cdef int64_t* ns
        cdef int64_t* nr
        if self.ring_n == self.ring_cap:
            c = self.ring_cap * 2
            ns = <int64_t*> malloc(c * sizeof(int64_t))
            nr = <int64_t*> malloc(c * sizeof(int64_t))
            if ns == NULL or nr == NULL:
                raise MemoryError()
            for k in range(self.ring_n):
                ns[k] = self.ring_slot[(self.ring_head + k) % self.ring_cap]
                nr[k] = self.ring_serial[(self.ring_head + k) % self.ring_cap]
            free(self.ring_slot)
            free(self.ring_serial)
            self.ring_slot = ns
            self.ring_serial = nr
            self.ring_cap = c
            self.ring_head = 0
        k = (self.ring_head + self.ring_n) % self.ring_cap
        self.ring_slot[k] = slot
        self.ring_serial[k] = ser
        self.ring_n += 1
        return 0

    # -- heap -------------------------------------------------------------

    cdef inline bint _before(self, int s, int64_t a, int64_t b) noexcept nogil:
        cdef int64_t pa = self.price[a], pb = self.price[b]
        if pa != pb:
            return pa < pb if s == ASK else pa > pb
        return self.serial[a] < self.serial[b]

    cdef inline int64_t* _heap(self, int s) noexcept nogil:
        return self.heap1 if s == ASK else self.heap0

    cdef void _sift_up(self, int s, int64_t i) noexcept nogil:
        cdef int64_t* h = self._heap(s)
        cdef int64_t item = h[i], parent
        while i > 0:
            parent = (i - 1) >> 1
            if self._before(s, item, h[parent]):
                h[i] = h[parent]
                self.heappos[h[i]] = i
                i = parent
            else:
                break
        h[i] = item
        self.heappos[item] = i

    cdef void _sift_down(self, int s, int64_t i) noexcept nogil:
        cdef int64_t* h = self._heap(s)
        cdef int64_t n = self.hn1 if s == ASK else self.hn0
        cdef int64_t item = h[i], child
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            if child + 1 < n and self._before(s, h[child + 1], h[child]):
                child += 1
            if self._before(s, h[child], item):
                h[i] = h[child]
                self.heappos[h[i]] = i
                i = child
            else:
                break
        h[i] = item
        self.heappos[item] = i

    cdef void _heap_push(self, int s, int64_t slot) noexcept nogil:
        cdef int64_t i
        if s == ASK:
            i = self.hn1
            self.hn1 += 1
        else:
            i = self.hn0
            self.hn0 += 1
        self._heap(s)[i] = slot
        self.heappos[slot] = i
        self._sift_up(s, i)

    cdef void _heap_remove(self, int s, int64_t i) noexcept nogil:
        cdef int64_t* h = self._heap(s)
        cdef int64_t last
        if s == ASK:
            self.hn1 -= 1
            last = h[self.hn1]
            if i == self.hn1:
                return
        else:
            self.hn0 -= 1
            last = h[self.hn0]
            if i == self.hn0:
                return
        h[i] = last
        self.heappos[last] = i
        self._sift_down(s, i)
        self._sift_up(s, self.heappos[last])

    # -- book operations ----------------------------------------------------

    cdef int64_t insert_with_serial(self, int s, int64_t p, int64_t b, int64_t ser) except -1:
        cdef int64_t slot
        if self.nfree:
            self.nfree -= 1
            slot = self.freelist[self.nfree]
        else:
            if self.nslots == self.cap:
                self._grow_slots()
            slot = self.nslots
            self.nslots += 1
        self.price[slot] = p
        self.birth[slot] = b
        self.serial[slot] = ser
        self.side[slot] = s
        self.flat[self.nflat] = slot
        self.flatpos[slot] = self.nflat
        self.nflat += 1
        self._heap_push(s, slot)
        if self.use_fifo:
            self._ring_push(slot, ser)
        return slot

    cdef inline int64_t insert(self, int s, int64_t p, int64_t b) except -1:
        cdef int64_t ser = self.next_serial
        self.next_serial += 1
        return self.insert_with_serial(s, p, b, ser)

    cdef void remove(self, int64_t slot) noexcept nogil:
        cdef int64_t k = self.flatpos[slot], last
        self._heap_remove(<int> self.side[slot], self.heappos[slot])
        self.nflat -= 1
        last = self.flat[self.nflat]
        if last != slot:
            self.flat[k] = last
            self.flatpos[last] = k
        self.serial[slot] = -1
        self.freelist[self.nfree] = slot
        self.nfree += 1

    cdef inline int64_t best(self, int s) noexcept nogil:
        if s == ASK:
            return self.heap1[0] if self.hn1 else -1
        return self.heap0[0] if self.hn0 else -1

    cdef inline int64_t count(self, int s) noexcept nogil:
        return self.hn1 if s == ASK else self.hn0

    cdef int expire(self, int64_t now, int64_t lifetime, object log) except -1:
        cdef int64_t cutoff = now - lifetime, slot, ser
        while self.ring_n:
            slot = self.ring_slot[self.ring_head]
            ser = self.ring_serial[self.ring_head]
            if self.serial[slot] != ser:
                self.ring_head = (self.ring_head + 1) % self.ring_cap
                self.ring_n -= 1
                continue
            if self.birth[slot] > cutoff:
                break
            self.ring_head = (self.ring_head + 1) % self.ring_cap
            self.ring_n -= 1
            if log is not None:
                log.append((self.birth[slot], now, self.price[slot], self.side[slot], "expired"))
            self.remove(slot)
        return 0

    # -- conversion ---------------------------------------------------------

    cdef load(self, book):
        side, price, birth, serial = book.to_arrays()
        cdef int64_t k, n = len(side)
        order = np.argsort(serial, kind="stable")
        slots = np.empty(n, dtype=np.int64)
        cdef int64_t[::1] sv = np.ascontiguousarray(side)
        cdef int64_t[::1] pv = np.ascontiguousarray(price)
        cdef int64_t[::1] bv = np.ascontiguousarray(birth)
        cdef int64_t[::1] kv = np.ascontiguousarray(serial)
        cdef int64_t[::1] ov = order
        cdef int64_t[::1] slv = slots
        cdef bint fifo = self.use_fifo
        self.use_fifo = False
        for k in range(n):
            slv[k] = self.insert_with_serial(<int> sv[k], pv[k], bv[k], kv[k])
        self.use_fifo = fifo
        if fifo:
            for k in range(n):
                self._ring_push(slv[ov[k]], kv[ov[k]])
        self.next_serial = book.next_serial

    cdef dump(self):
        from .core import Book
        cdef int64_t k, slot, n = self.nflat
        side = np.empty(n, dtype=np.int64)
        price = np.empty(n, dtype=np.int64)
        birth = np.empty(n, dtype=np.int64)
        serial = np.empty(n, dtype=np.int64)
        cdef int64_t[::1] sv = side, pv = price, bv = birth, kv = serial
        for k in range(n):
            slot = self.flat[k]
            sv[k] = self.side[slot]
            pv[k] = self.price[slot]
            bv[k] = self.birth[slot]
            kv[k] = self.serial[slot]
        return Book.from_arrays(side, price, birth, serial, self.next_serial)


cdef _CBook _book_from(book, bint use_fifo):
    cdef _CBook cb = _CBook(2 * len(book) + 64, use_fifo)
    cb.load(book)
    return cb


# ---------------------------------------------------------------------------
# Bak-Paczuski-Shubik
# ---------------------------------------------------------------------------

def advance_bps(state, int64_t nsteps, rng, bint record=True):
    cdef bitgen_t* g = _bitgen(rng)
    cdef int64_t[::1] pos = state.pos
    cdef int64_t[::1] occ_b = state.occ_b
    cdef int64_t[::1] occ_a = state.occ_a
    cdef int64_t L = state.L, N = state.N
    cdef int64_t price = state.price, step = state.step
    cdef uint64_t four_n = 4 * N
    cdef uint64_t u
    cdef int64_t k, i, j, here, dest
    cdef _I64Buf tt = _I64Buf(), tp = _I64Buf()
    for k in range(nsteps):
        u = _below(g, four_n)
        i = <int64_t> (u >> 1)
        here = pos[i]
        dest = here + 1 if (u & 1) else here - 1
        step += 1
        if dest < 1 or dest > L:
            continue
        if i < N:
            if occ_a[dest] > 0:
                j = N
                while pos[j] != dest:
                    j += 1
                occ_b[here] -= 1
                occ_a[dest] -= 1
                pos[i] = 1
                occ_b[1] += 1
                pos[j] = L
                occ_a[L] += 1
                price = dest
                if record:
                    tt.push(step)
                    tp.push(dest)
            else:
                occ_b[here] -= 1
                occ_b[dest] += 1
                pos[i] = dest
        else:
            if occ_b[dest] > 0:
                j = 0
                while pos[j] != dest:
                    j += 1
                occ_a[here] -= 1
                occ_b[dest] -= 1
                pos[i] = L
                occ_a[L] += 1
                pos[j] = 1
                occ_b[1] += 1
                price = dest
                if record:
                    tt.push(step)
                    tp.push(dest)
            else:
                occ_a[here] -= 1
                occ_a[dest] += 1
                pos[i] = dest
    state.price = price
    state.step = step
    return tt.array(), tp.array()


# ---------------------------------------------------------------------------
# Stigler / free Stigler / Genoa
# ---------------------------------------------------------------------------

cdef inline bint _place_and_match(_CBook book, int s, int64_t c, int64_t t,
                                  int64_t* x) except -1:
    cdef int64_t best
    if s == BID:
        best = book.best(ASK)
        if best >= 0 and book.price[best] <= c:
            x[0] = book.price[best]
            book.remove(best)
            return True
    else:
        best = book.best(BID)
        if best >= 0 and book.price[best] >= c:
            x[0] = book.price[best]
            book.remove(best)
            return True
    book.insert(s, c, t)
    return False


def advance_stigler(state, config, int64_t nsteps, rng):
    cdef bitgen_t* g = _bitgen(rng)
    cdef _CBook book = _book_from(state.book, True)
    cdef bint free_variant = config.variant == "free"
    cdef int64_t lifetime = config.N
    cdef int64_t L = config.L if not free_variant else 0
    cdef int64_t s = config.s if free_variant else 0
    cdef int64_t d = config.d if free_variant else 0
    cdef int64_t x = state.x, t = state.t, k, c
    cdef int side
    prices = np.empty(nsteps, dtype=np.int64)
    traded = np.zeros(nsteps, dtype=np.uint8)
    cdef int64_t[::1] pv = prices
    cdef unsigned char[::1] tv = traded
    for k in range(nsteps):
        book.expire(t, lifetime, None)
        side = _coin(g)
        if free_variant:
            if side == BID:
                c = x - s - (d + 1) // 2 + 1 + <int64_t> _below(g, d)
            else:
                c = x + s - d // 2 + <int64_t> _below(g, d)
        else:
            c = 1 + <int64_t> _below(g, L)
        tv[k] = _place_and_match(book, side, c, t, &x)
        t += 1
        pv[k] = x
    state.x = x
    state.t = t
    state.book = book.dump()
    return prices, np.flatnonzero(traded).astype(np.int64)


def advance_genoa(state, config, int64_t nsteps, rng, bint record_v=True):
    cdef bitgen_t* g = _bitgen(rng)
    cdef _CBook book = _book_from(state.book, True)
    cdef int64_t lifetime = config.N
    cdef double gain = config.g, b = config.b, lam = config.lam, v_cap = config.v_cap
    cdef double v = state.v, gv
    cdef bint diverged = state.diverged
    cdef int64_t x = state.x, t = state.t, k, c, d, s, x_before, r
    cdef int side
    prices = np.empty(nsteps, dtype=np.int64)
    traded = np.zeros(nsteps, dtype=np.uint8)
    vs = np.empty(nsteps if record_v else 0, dtype=np.float64)
    cdef int64_t[::1] pv = prices
    cdef unsigned char[::1] tv = traded
    cdef double[::1] vv = vs
    for k in range(nsteps):
        gv = ceil(gain * v)
        d = <int64_t> gv
        if d < 1:
            d = 1
        s = <int64_t> floor(<double> d / b)
        x_before = x
        book.expire(t, lifetime, None)
        side = _coin(g)
        if side == BID:
            c = x - s - (d + 1) // 2 + 1 + <int64_t> _below(g, d)
        else:
            c = x + s - d // 2 + <int64_t> _below(g, d)
        tv[k] = _place_and_match(book, side, c, t, &x)
        t += 1
        r = x - x_before
        if r < 0:
            r = -r
        v = (1.0 - lam) * v + lam * <double> r
        if v >= v_cap:
            v = v_cap
            diverged = True
        pv[k] = x
        if record_v:
            vv[k] = v
    state.x = x
    state.t = t
    state.v = v
    state.diverged = diverged
    state.book = book.dump()
    return prices, np.flatnonzero(traded).astype(np.int64), (vs if record_v else None)


# ---------------------------------------------------------------------------
# Maslov / UDM
# ---------------------------------------------------------------------------

cdef int _evaporate(_CBook book, bitgen_t* g, int64_t t, object log) except -1:
    cdef int64_t slot
    if book.nflat == 0:
        return 0
    slot = book.flat[<int64_t> _below(g, <uint64_t> book.nflat)]
    if log is not None:
        log.append((book.birth[slot], t, book.price[slot], book.side[slot], "evaporated"))
    book.remove(slot)
    return 0


cdef bint _satisfy(_CBook book, int s, int64_t t, int64_t* x, object log) except -1:
    cdef int64_t slot = book.best(s)
    if slot < 0:
        return False
    x[0] = book.price[slot]
    if log is not None:
        log.append((book.birth[slot], t, book.price[slot], book.side[slot], "satisfied"))
    book.remove(slot)
    return True


cdef _event_model(state, config, int64_t nsteps, rng, object log, bint uniform_deposit):
    cdef bitgen_t* g = _bitgen(rng)
    cdef bint fixed = (not uniform_deposit) and config.removal == "lifetime"
    cdef _CBook book = _book_from(state.book, fixed)
    cdef int64_t lifetime = config.lifetime if fixed else 0
    cdef double q = config.q, nbar = float(config.nbar), denom, w_dep, w_sat, u
    cdef int64_t L = config.L if uniform_deposit else 0
    cdef int64_t half = L // 2
    cdef int64_t x = state.x, t = state.t, k, c
    cdef int side
    prices = np.empty(nsteps, dtype=np.int64)
    traded = np.zeros(nsteps, dtype=np.uint8)
    cdef int64_t[::1] pv = prices
    cdef unsigned char[::1] tv = traded
    for k in range(nsteps):
        if fixed:
            book.expire(t, lifetime, log)
            w_dep = 0.5
            w_sat = 0.5
        else:
            denom = 2.0 + q * (<double> book.nflat / nbar - 1.0)
            w_dep = 1.0 / denom
            w_sat = (1.0 - q) / denom
        u = _uniform(g)
        if u < w_dep:
            if uniform_deposit:
                c = -half + <int64_t> _below(g, <uint64_t> (L - 1))
                if c >= x:
                    c += 1
                side = ASK if c > x else BID
            else:
                side = _coin(g)
                c = x - 1 if side == BID else x + 1
            book.insert(side, c, t)
        elif u < w_dep + w_sat:
            tv[k] = _satisfy(book, _coin(g), t, &x, log)
        else:
            _evaporate(book, g, t, log)
        t += 1
        pv[k] = x
    state.x = x
    state.t = t
    state.book = book.dump()
    return prices, np.flatnonzero(traded).astype(np.int64)


def advance_maslov(state, config, int64_t nsteps, rng, log=None):
    return _event_model(state, config, nsteps, rng, log, False)


def advance_udm(state, config, int64_t nsteps, rng, log=None):
    return _event_model(state, config, nsteps, rng, log, True)
