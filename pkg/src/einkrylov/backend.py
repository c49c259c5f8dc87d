"""Selection of the convolution kernel backend.

Two interchangeable implementations of the hot stencil kernel exist:
a numba-compiled one (`einkrylov._conv_numba`) and a pure-numpy one
(`einkrylov._conv_numpy`).  The environment variable ``EINKRYLOV_BACKEND``
picks one at import time:

* ``numba`` — require the numba kernel (raises if numba is unavailable),
* ``numpy`` — force the pure-numpy fallback,
* unset or ``auto`` — numba when importable, numpy otherwise.

``EINKRYLOV_THREADS`` caps the number of threads the numba kernel may use;
the numpy fallback is single-threaded.  See ``benchmarks/bench_blur.py``
for a timing comparison of the two paths.
"""

import os

from . import _conv_numpy

try:
    import numba as _numba

    from . import _conv_numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    _conv_numba = None
    HAS_NUMBA = False


def _configure_threads():
    raw = os.environ.get("EINKRYLOV_THREADS", "").strip()
    if raw and HAS_NUMBA:
        limit = max(1, int(raw))
        _numba.set_num_threads(min(limit, _numba.config.NUMBA_NUM_THREADS))


def _select(name):
    name = (name or "auto").strip().lower()
    if name == "numpy":
        return "numpy"
    if name == "numba":
        if not HAS_NUMBA:
            raise ImportError("EINKRYLOV_BACKEND=numba requested but numba is not importable")
        return "numba"
    if name in ("", "auto"):
        return "numba" if HAS_NUMBA else "numpy"
    raise ValueError(f"unknown EINKRYLOV_BACKEND value: {name!r}")


_ACTIVE = _select(os.environ.get("EINKRYLOV_BACKEND"))
_configure_threads()


def active_backend() -> str:
    """Name of the kernel backend chosen at import time."""
    return _ACTIVE


def correlate2d_zero(x, w, ai, aj):
    """Dispatch the zero-boundary correlation stencil to the active backend."""
    if _ACTIVE == "numba":
        return _conv_numba.correlate2d_zero(x, w, ai, aj)
    return _conv_numpy.correlate2d_zero(x, w, ai, aj)
