"""Kernel backend selection.

The compiled extension is used when it imports; otherwise, or when
``ORDERBOOK_LAB_PURE_PYTHON`` is set to a non-empty value, the pure-Python
kernels run instead. :func:`use` switches explicitly (tests, benchmarks).
"""

from __future__ import annotations

import contextlib
import importlib
import os
import warnings

_active = None


def _load(name: str):
    if name == "cython":
        return importlib.import_module("orderbook_lab._kernels")
    if name == "python":
        return importlib.import_module("orderbook_lab._pykernels")
    raise ValueError(f"unknown backend {name!r}")


def available() -> list[str]:
    names = ["python"]
    try:
        _load("cython")
        names.insert(0, "cython")
    except ImportError:
        pass
    return names


def kernels():
    global _active
    if _active is None:
        if os.environ.get("ORDERBOOK_LAB_PURE_PYTHON"):
            _active = _load("python")
        else:
            try:
                _active = _load("cython")
            except ImportError:
                warnings.warn("compiled kernels unavailable; using the pure-Python fallback",
                              RuntimeWarning, stacklevel=2)
                _active = _load("python")
    return _active


def name() -> str:
    return kernels().NAME


@contextlib.contextmanager
def use(backend: str):
    """Temporarily run every model on ``backend`` ('cython' or 'python')."""
    global _active
    previous = _active
    _active = _load(backend)
    try:
        yield _active
    finally:
        _active = previous
