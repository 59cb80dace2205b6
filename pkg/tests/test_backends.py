"""Compiled and pure-Python kernels must produce identical trajectories."""

import numpy as np
import pytest

from orderbook_lab import _backend
from orderbook_lab.bps import BpsConfig, bps_advance, bps_init
from orderbook_lab.core import RngStream
from orderbook_lab.genoa import GenoaConfig, genoa_advance, genoa_init
from orderbook_lab.maslov import MaslovConfig, MaslovState, maslov_advance
from orderbook_lab.stigler import StiglerConfig, stigler_advance, stigler_init
from orderbook_lab.udm import UdmConfig, UdmState, udm_advance

pytestmark = pytest.mark.skipif("cython" not in _backend.available(),
                                reason="compiled kernels not built")


def _bps(steps):
    r = RngStream(11)
    s = bps_init(BpsConfig(L=60, N=20), r)
    out = bps_advance(s, steps, r)
    return out, s.pos.copy()


def _stigler(variant):
    def run(steps):
        cfg = (StiglerConfig("bounded", N=300, L=300) if variant == "bounded"
               else StiglerConfig("free", N=300, s=20, d=51))
        st = stigler_init(cfg)
        out = stigler_advance(st, cfg, steps, RngStream(12))
        return out, st.book.to_arrays()
    return run


def _genoa(steps):
    cfg = GenoaConfig(N=300, b=7, g=40)
    st = genoa_init(cfg)
    out = genoa_advance(st, cfg, steps, RngStream(13))
    return out, (st.v, st.book.to_arrays())


def _maslov(cfg):
    def run(steps):
        st = MaslovState()
        out = maslov_advance(st, cfg, steps, RngStream(14))
        return out, st.book.to_arrays()
    return run


def _udm(steps):
    st = UdmState()
    out = udm_advance(st, UdmConfig(L=1000, q=0.5, nbar=30), steps, RngStream(15))
    return out, st.book.to_arrays()


CASES = {
    "bps": _bps,
    "stigler-bounded": _stigler("bounded"),
    "stigler-free": _stigler("free"),
    "genoa": _genoa,
    "maslov-evaporation": _maslov(MaslovConfig(q=0.05, nbar=50)),
    "maslov-lifetime": _maslov(MaslovConfig(removal="lifetime", lifetime=60)),
    "udm": _udm,
}


def _flatten(obj):
    if isinstance(obj, np.ndarray):
        return [obj.tolist()]
    if isinstance(obj, (tuple, list)):
        return [x for o in obj for x in _flatten(o)]
    return [obj]


@pytest.mark.parametrize("name", CASES)
def test_backends_identical(name):
    results = {}
    for b in ("python", "cython"):
        with _backend.use(b):
            results[b] = _flatten(CASES[name](30_000))
    assert results["python"] == results["cython"]
