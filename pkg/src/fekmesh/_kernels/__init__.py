"""Numerical hot-path kernels with two interchangeable backends.

The numba backend compiles the inner loops; the numpy backend is a pure
vectorized fallback with identical semantics.  Selection happens once at
import time from the environment variable ``FEKMESH_BACKEND``:

* ``auto`` (default): numba when importable, else numpy
* ``numba``: require the compiled backend, fail loudly if unavailable
* ``numpy``: force the fallback

``benchmarks/bench_kernels.py`` times the two implementations against
each other on representative workloads.
"""

from __future__ import annotations

import os

from fekmesh._kernels import _impl_numpy

_CHOICES = ("auto", "numba", "numpy")
_requested = os.environ.get("FEKMESH_BACKEND", "auto").strip().lower()
if _requested not in _CHOICES:
    raise ValueError(
        f"FEKMESH_BACKEND={_requested!r} not understood; expected one of {_CHOICES}"
    )

_impl = None
if _requested in ("auto", "numba"):
    try:
        from fekmesh._kernels import _impl_numba as _impl
    except ImportError:
        if _requested == "numba":
            raise
        _impl = None
if _impl is None:
    _impl = _impl_numpy

BACKEND = "numba" if _impl is not _impl_numpy else "numpy"

select_pivots = _impl.select_pivots
chebyshev_table = _impl.chebyshev_table
logan_shepp_matrix = _impl.logan_shepp_matrix
points_in_polygon = _impl.points_in_polygon

__all__ = [
    "BACKEND",
    "select_pivots",
    "chebyshev_table",
    "logan_shepp_matrix",
    "points_in_polygon",
]
