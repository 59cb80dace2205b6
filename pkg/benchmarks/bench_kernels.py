"""Compiled vs pure-Python kernel throughput, one model at a time.

Each model advances the same number of steps from the same seed on both
backends; the price series must match exactly before timings are reported.

    python3 benchmarks/bench_kernels.py [--steps 200000] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from orderbook_lab import _backend
from orderbook_lab.bps import BpsConfig, bps_advance, bps_init
from orderbook_lab.core import RngStream
from orderbook_lab.genoa import GenoaConfig, genoa_advance, genoa_init
from orderbook_lab.maslov import MaslovConfig, MaslovState, maslov_advance
from orderbook_lab.stigler import StiglerConfig, stigler_advance, stigler_init
from orderbook_lab.udm import UdmConfig, UdmState, udm_advance


def _bps(steps, seed):
    cfg = BpsConfig(L=500, N=200)
    rng = RngStream(seed)
    state = bps_init(cfg, rng)
    return bps_advance(state, steps, rng)[1]


def _stigler(variant):
    def run(steps, seed):
        if variant == "bounded":
            cfg = StiglerConfig("bounded", N=5000, L=5000)
        else:
            cfg = StiglerConfig("free", N=5000, s=4000, d=10_000)
        return stigler_advance(stigler_init(cfg), cfg, steps, RngStream(seed))[0]
    return run


def _genoa(steps, seed):
    cfg = GenoaConfig(N=1000, b=7, g=51)
    return genoa_advance(genoa_init(cfg), cfg, steps, RngStream(seed))[0]


def _maslov(steps, seed):
    cfg = MaslovConfig(q=0.01, nbar=1000)
    return maslov_advance(MaslovState(), cfg, steps, RngStream(seed))[0]


def _udm(steps, seed):
    cfg = UdmConfig(L=1_000_000, q=0.9, nbar=10_000)
    return udm_advance(UdmState(), cfg, steps, RngStream(seed))[0]


MODELS = {
    "bps": _bps,
    "stigler-bounded": _stigler("bounded"),
    "stigler-free": _stigler("free"),
    "genoa": _genoa,
    "maslov": _maslov,
    "udm": _udm,
}


def _time(fn, steps, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(steps, 7)
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--models", nargs="*", default=list(MODELS))
    args = ap.parse_args(argv)

    if "cython" not in _backend.available():
        raise SystemExit("compiled kernels not built; run 'pip install -e . --no-build-isolation'")
    print(f"{'model':16s} {'python steps/s':>15s} {'cython steps/s':>15s} {'speedup':>8s}  same")
    for name in args.models:
        fn = MODELS[name]
        with _backend.use("python"):
            t_py, out_py = _time(fn, args.steps, args.repeat)
        with _backend.use("cython"):
            t_cy, out_cy = _time(fn, args.steps, args.repeat)
        same = np.array_equal(out_py, out_cy)
        print(f"{name:16s} {args.steps / t_py:15.3g} {args.steps / t_cy:15.3g} "
              f"{t_py / t_cy:8.1f}  {'yes' if same else 'NO'}")
        if not same:
            raise SystemExit(f"{name}: backends disagree")


if __name__ == "__main__":
    main()
