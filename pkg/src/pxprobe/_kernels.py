"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set ``PXPROBE_PURE_PYTHON=1`` to force the fallback.
"""
import os

import numpy as np

from . import _pykernels

if os.environ.get("PXPROBE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

TIE_TOL = 1e-12


def _rows(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    return a if a.ndim == 2 else a.reshape(len(a), -1)


def _vec(a):
    return np.ascontiguousarray(a, dtype=np.float64).ravel()


def nearest(points, q, tol=TIE_TOL, impl=None):
    return (impl or _impl).nearest(_rows(points), _vec(q), tol)


def nearest_many(points, queries, tol=TIE_TOL, impl=None):
    return (impl or _impl).nearest_many(_rows(points), _rows(queries), tol)


def min_dist_update(centers, g, mind, impl=None):
    (impl or _impl).min_dist_update(_rows(centers), _vec(g), mind)


def cell_ball_distances(lows, sides, c, impl=None):
    return (impl or _impl).cell_ball_distances(_rows(lows), _vec(sides), _vec(c))


def inside_any_ball(lows, sides, centers, radii, tol=TIE_TOL, impl=None):
    if len(lows) == 0 or len(centers) == 0:
        return np.zeros(len(lows), dtype=bool)
    return (impl or _impl).inside_any_ball(
        _rows(lows), _vec(sides), _rows(centers), _vec(radii), tol)


def adversarial_pick(points, q, factor, tol=TIE_TOL, impl=None):
    return (impl or _impl).adversarial_pick(_rows(points), _vec(q), float(factor), tol)


def carve_scan(lows, sides, depths, live, c, r, limit, max_depth, tol=TIE_TOL, impl=None):
    impl = impl or _impl
    if impl is _pykernels:
        return impl.carve_scan(lows, sides, depths, live.view(bool), _vec(c), float(r), tol,
                               float(limit), int(max_depth))
    return impl.carve_scan(lows, sides, depths, live.view(np.uint8), _vec(c), float(r), tol,
                           float(limit), int(max_depth))


def bound_scan(mind, sides, depths, dim, max_depth, thresh, impl=None):
    return (impl or _impl).bound_scan(mind, sides, depths, int(dim), int(max_depth), float(thresh))


def available_backends():
    """Mapping of backend name to implementation module, for tests and benchmarks."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
