# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Contracts mirror ``pxprobe._pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


cdef inline bint _lex_less(const double[:, ::1] pts, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    cdef Py_ssize_t j
    for j in range(pts.shape[1]):
        if pts[a, j] < pts[b, j]:
            return True
        if pts[a, j] > pts[b, j]:
            return False
    return False


cdef inline double _dist2(const double[:, ::1] pts, Py_ssize_t i, const double[::1] q) noexcept nogil:
    cdef double s = 0.0, t
    cdef Py_ssize_t j
    for j in range(pts.shape[1]):
        t = pts[i, j] - q[j]
        s += t * t
    return s


def nearest(const double[:, ::1] points, const double[::1] q, double tol):
    cdef Py_ssize_t n = points.shape[0], i, best = -1
    cdef double m = 1e300, d
    dist_arr = np.empty(n)
    cdef double[::1] dist = dist_arr
    with nogil:
        for i in range(n):
            d = sqrt(_dist2(points, i, q))
            dist[i] = d
            if d < m:
                m = d
        for i in range(n):
            if dist[i] <= m + tol:
                if best < 0 or _lex_less(points, i, best):
                    best = i
    return int(best), float(dist[best])


def nearest_many(const double[:, ::1] points, const double[:, ::1] queries, double tol):
    cdef Py_ssize_t n = queries.shape[0], m = points.shape[0], dim = points.shape[1]
    cdef Py_ssize_t a, i, j, best
    cdef double mn, d, s, t
    idx_arr = np.empty(n, dtype=np.int64)
    dist_arr = np.empty(n)
    buf_arr = np.empty(m)
    cdef long long[::1] idx = idx_arr
    cdef double[::1] dist = dist_arr
    cdef double[::1] buf = buf_arr
    with nogil:
        for a in range(n):
            mn = 1e300
            for i in range(m):
                s = 0.0
                for j in range(dim):
                    t = points[i, j] - queries[a, j]
                    s += t * t
                d = sqrt(s)
                buf[i] = d
                if d < mn:
                    mn = d
            best = -1
            for i in range(m):
                if buf[i] <= mn + tol:
                    if best < 0 or _lex_less(points, i, best):
                        best = i
            idx[a] = best
            dist[a] = buf[best]
    return idx_arr, dist_arr


def min_dist_update(const double[:, ::1] centers, const double[::1] g, double[::1] mind):
    cdef Py_ssize_t i
    cdef double d
    with nogil:
        for i in range(centers.shape[0]):
            d = sqrt(_dist2(centers, i, g))
            if d < mind[i]:
                mind[i] = d


def cell_ball_distances(const double[:, ::1] lows, const double[::1] sides, const double[::1] c):
    cdef Py_ssize_t n = lows.shape[0], dim = lows.shape[1], i, j
    cdef double sn, sf, lo, hi, t, u
    near_arr = np.empty(n)
    far_arr = np.empty(n)
    cdef double[::1] near = near_arr
    cdef double[::1] far = far_arr
    with nogil:
        for i in range(n):
            sn = 0.0
            sf = 0.0
            for j in range(dim):
                lo = lows[i, j]
                hi = lo + sides[i]
                if c[j] < lo:
                    t = lo - c[j]
                elif c[j] > hi:
                    t = c[j] - hi
                else:
                    t = 0.0
                sn += t * t
                t = fabs(c[j] - lo)
                u = fabs(c[j] - hi)
                if u > t:
                    t = u
                sf += t * t
            near[i] = sqrt(sn)
            far[i] = sqrt(sf)
    return near_arr, far_arr


def inside_any_ball(const double[:, ::1] lows, const double[::1] sides,
                    const double[:, ::1] centers, const double[::1] radii, double tol):
    cdef Py_ssize_t n = lows.shape[0], nb = centers.shape[0], dim = lows.shape[1]
    cdef Py_ssize_t i, b, j
    cdef double lim, sf, t, u, lo
    out_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    with nogil:
        for i in range(n):
            for b in range(nb):
                lim = radii[b] - tol
                if lim <= 0:
                    continue
                lim = lim * lim
                sf = 0.0
                for j in range(dim):
                    lo = lows[i, j]
                    t = fabs(centers[b, j] - lo)
                    u = fabs(centers[b, j] - (lo + sides[i]))
                    if u > t:
                        t = u
                    sf += t * t
                    if sf > lim:
                        break
                if sf <= lim:
                    out[i] = 1
                    break
    return out_arr.view(bool)


def adversarial_pick(const double[:, ::1] points, const double[::1] q, double factor, double tol):
    cdef Py_ssize_t n = points.shape[0], i, best = -1
    cdef double mn = 1e300, limit, top = -1.0, d
    dist_arr = np.empty(n)
    cdef double[::1] dist = dist_arr
    with nogil:
        for i in range(n):
            d = sqrt(_dist2(points, i, q))
            dist[i] = d
            if d < mn:
                mn = d
        limit = factor * mn
        for i in range(n):
            if dist[i] <= limit and dist[i] > top:
                top = dist[i]
        for i in range(n):
            if dist[i] <= limit and dist[i] >= top - tol:
                if best < 0 or _lex_less(points, i, best):
                    best = i
    return int(best), float(dist[best])


def carve_scan(const double[:, ::1] lows, const double[::1] sides, const long long[::1] depths,
               const unsigned char[::1] live, const double[::1] c, double r, double tol,
               double limit, long long max_depth):
    cdef Py_ssize_t n = lows.shape[0], dim = lows.shape[1], i, j
    cdef Py_ssize_t ni = 0, ns = 0, nt = 0
    cdef double sn, sf, lo, hi, t, u, sq = sqrt(<double>dim), r2 = r * r, lim2
    inside_arr = np.empty(n, dtype=np.int64)
    split_arr = np.empty(n, dtype=np.int64)
    touch_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] inside = inside_arr
    cdef long long[::1] split = split_arr
    cdef long long[::1] touch = touch_arr
    lim2 = (r - tol) * (r - tol) if r > tol else -1.0
    with nogil:
        for i in range(n):
            if not live[i]:
                continue
            sn = 0.0
            for j in range(dim):
                lo = lows[i, j]
                hi = lo + sides[i]
                if c[j] < lo:
                    t = lo - c[j]
                elif c[j] > hi:
                    t = c[j] - hi
                else:
                    t = 0.0
                sn += t * t
            if sn >= r2:
                continue
            sf = 0.0
            for j in range(dim):
                lo = lows[i, j]
                t = fabs(c[j] - lo)
                u = fabs(c[j] - (lo + sides[i]))
                if u > t:
                    t = u
                sf += t * t
            if sf <= lim2:
                inside[ni] = i
                ni += 1
            elif sides[i] * sq > limit and depths[i] < max_depth:
                split[ns] = i
                ns += 1
            else:
                touch[nt] = i
                nt += 1
    return inside_arr[:ni].copy(), split_arr[:ns].copy(), touch_arr[:nt].copy()


def bound_scan(const double[::1] mind, const double[::1] sides, const long long[::1] depths,
               Py_ssize_t dim, long long max_depth, double thresh):
    cdef Py_ssize_t n = mind.shape[0], i, k = 0
    cdef double h = 0.5 * sqrt(<double>dim)
    out_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] out = out_arr
    with nogil:
        for i in range(n):
            if mind[i] + sides[i] * h > thresh and depths[i] < max_depth:
                out[k] = i
                k += 1
    return out_arr[:k].copy()
