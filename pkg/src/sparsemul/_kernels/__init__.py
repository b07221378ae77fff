"""Kernel backend selection.

``SPARSEMUL_BACKEND=numpy`` forces the pure-numpy path; the default is
numba when it imports cleanly.  ``get_backend(name)`` returns either
implementation explicitly, which is what the tests and the benchmark use.
"""

import importlib
import logging
import os

log = logging.getLogger(__name__)

BACKENDS = ("numba", "numpy")

_cache = {}


def get_backend(name=None):
    if name is None:
        name = os.environ.get("SPARSEMUL_BACKEND", "numba").strip().lower() or "numba"
    if name not in BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; expected one of {BACKENDS}")
    if name not in _cache:
        try:
            _cache[name] = importlib.import_module(f"{__name__}.{name}_impl")
        except ImportError:
            if name == "numpy":
                raise
            log.warning("numba unavailable, falling back to numpy kernels")
            _cache[name] = get_backend("numpy")
    return _cache[name]


def available():
    out = []
    for name in BACKENDS:
        try:
            if get_backend(name).NAME == name:
                out.append(name)
        except ImportError:
            pass
    return out


kernels = get_backend()
