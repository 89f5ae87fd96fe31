"""Numpy implementations of the hot loops.

Same contracts as the compiled ``_ckernels`` module; used when the extension
is not built or ``PXPROBE_PURE_PYTHON`` is set.
"""
import numpy as np

_BLOCK = 1 << 21


def _chunk(*dims):
    return max(1, _BLOCK // max(1, int(np.prod(dims))))


def _lex_order_rank(points):
    order = np.lexsort(points.T[::-1])
    rank = np.empty(len(points), dtype=np.int64)
    rank[order] = np.arange(len(points))
    return rank


def nearest(points, q, tol):
    """Index and distance of the nearest row of ``points`` to ``q``.

    Rows within ``tol`` of the minimum distance tie; the lexicographically
    smallest one wins.
    """
    diff = points - q
    d = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    m = d.min()
    cand = np.flatnonzero(d <= m + tol)
    if len(cand) == 1:
        i = cand[0]
    else:
        i = cand[np.lexsort(points[cand].T[::-1])[0]]
    return int(i), float(d[i])


def nearest_many(points, queries, tol):
    n = len(queries)
    idx = np.empty(n, dtype=np.int64)
    dist = np.empty(n, dtype=np.float64)
    rank = _lex_order_rank(points)
    big = np.iinfo(np.int64).max
    step = _chunk(*points.shape)
    for s in range(0, n, step):
        qs = queries[s:s + step]
        diff = qs[:, None, :] - points[None, :, :]
        d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        m = d.min(axis=1)
        tied = d <= (m + tol)[:, None]
        j = np.where(tied, rank[None, :], big).argmin(axis=1)
        idx[s:s + step] = j
        dist[s:s + step] = d[np.arange(len(qs)), j]
    return idx, dist


def min_dist_update(centers, g, mind):
    diff = centers - g
    np.minimum(mind, np.sqrt(np.einsum("ij,ij->i", diff, diff)), out=mind)


def cell_ball_distances(lows, sides, c):
    """Nearest and farthest distance from ``c`` to each axis-aligned cell."""
    highs = lows + sides[:, None]
    near = np.clip(c, lows, highs) - c
    far = np.maximum(np.abs(c - lows), np.abs(c - highs))
    return (np.sqrt(np.einsum("ij,ij->i", near, near)),
            np.sqrt(np.einsum("ij,ij->i", far, far)))


def inside_any_ball(lows, sides, centers, radii, tol):
    """Mask of cells whose farthest corner is within ``r - tol`` of some ball."""
    out = np.zeros(len(lows), dtype=bool)
    if len(centers) == 0 or len(lows) == 0:
        return out
    highs = lows + sides[:, None]
    lim = radii - tol
    step = _chunk(*centers.shape)
    for s in range(0, len(lows), step):
        lo = lows[s:s + step, None, :]
        hi = highs[s:s + step, None, :]
        c = centers[None, :, :]
        far = np.maximum(np.abs(c - lo), np.abs(c - hi))
        far2 = np.einsum("ijk,ijk->ij", far, far)
        ok = (lim > 0)[None, :] & (far2 <= (lim * lim)[None, :])
        out[s:s + step] = ok.any(axis=1)
    return out


def adversarial_pick(points, q, factor, tol):
    """Farthest row of ``points`` still within ``factor`` times the NN distance."""
    diff = points - q
    d = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    limit = factor * d.min()
    legal = np.flatnonzero(d <= limit)
    dl = d[legal]
    top = legal[dl >= dl.max() - tol]
    i = top[np.lexsort(points[top].T[::-1])[0]] if len(top) > 1 else top[0]
    return int(i), float(d[i])


def carve_scan(lows, sides, depths, live, c, r, tol, limit, max_depth):
    """Classify live cells against the open ball ``(c, r)``.

    Returns (inside, split, touch): slots strictly inside the ball, slots
    crossing its boundary that are wider than ``limit`` and below
    ``max_depth``, and the remaining crossing slots.
    """
    near, far = cell_ball_distances(lows, sides, c)
    hit = live & (near < r)
    inside = hit & (far <= r - tol)
    crossing = hit & ~inside
    wide = (sides * np.sqrt(lows.shape[1]) > limit) & (depths < max_depth)
    return (np.flatnonzero(inside), np.flatnonzero(crossing & wide),
            np.flatnonzero(crossing & ~wide))


def bound_scan(mind, sides, depths, dim, max_depth, thresh):
    """Slots whose upper bound ``mind + half diagonal`` exceeds ``thresh``.

    Dead slots carry ``mind = -inf`` and never qualify.
    """
    bound = mind + sides * (0.5 * np.sqrt(dim))
    return np.flatnonzero((bound > thresh) & (depths < max_depth))
